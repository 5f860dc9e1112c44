#pragma once

// Brute-force verifiers and synthetic data generators. The verifiers are
// exponential-time and refuse inputs above a size bound.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "cgf/cascade_graph.hpp"

namespace cgf::oracle {

// length -> number of paths of that length
using PathHistogram = std::map<std::uint32_t, std::uint64_t>;

// Exhaustive DFS over every path starting at `seed`. Entry j is the
// histogram of paths ending at j (the seed itself gets {0: 1}).
std::vector<PathHistogram> enumerate_paths(const CascadeGraph& cg, Label seed,
                                           std::size_t bound = 50);

// BFS over out-edges.
std::vector<bool> reachable_from(const CascadeGraph& cg, Label seed);

// Longest path in edges, found by trying every path from every seed.
std::uint32_t longest_path(const CascadeGraph& cg, std::size_t bound = 50);

struct DagSpec {
    std::size_t nodes = 20;
    std::size_t max_in_degree = 3;
    std::size_t seeds = 1;  // label 0 is always one of them
    bool fixed_degree = false;  // every non-seed takes min(max_in_degree, label) parents
    bool leading_seeds = false;  // seeds take labels 0..seeds-1, so every cascade is deep
    std::uint64_t random_seed = 1;
};

// Random cascade DAG with distinct timestamps (timestamp = label) and
// shuffled node ids.
CascadeGraph random_dag(const DagSpec& spec);

// Follower graph and log that ingest to exactly `cg`.
std::pair<FollowerGraph, ActivationLog> to_inputs(const CascadeGraph& cg, const std::string& story);

enum class DegreeModel { Fixed, UniformUpTo };

struct SyntheticSpec {
    std::size_t nodes = 200;        // population of the follower graph
    DegreeModel degree_model = DegreeModel::UniformUpTo;
    std::size_t degree = 4;         // friends per node (or the upper bound)
    std::size_t seeds = 3;          // spontaneous activations per story
    double transmission = 0.3;      // independent-cascade edge probability
    std::size_t stories = 1;
    double seed_window = 10.0;      // seeds start uniformly in [0, window); the first story's first seed at 0
    std::uint64_t random_seed = 1;
};

struct SyntheticCorpus {
    FollowerGraph graph;
    std::vector<ActivationLog> logs;
    std::vector<CascadeGraph> truth;  // cascade graph of each story, built by edge scan
};

// Continuous-time independent cascade on a random follower graph.
SyntheticCorpus generate(const SyntheticSpec& spec);

// Variate generators for the fitted families; used by the sampling oracles.
std::vector<double> draw_lognormal(std::size_t n, double mu, double sigma, std::mt19937_64& rng);
std::vector<double> draw_weibull(std::size_t n, double k, double lambda, double eta,
                                 std::mt19937_64& rng);
std::vector<double> draw_weibull_mixture(std::size_t n, const std::vector<double>& weights,
                                         const std::vector<double>& k,
                                         const std::vector<double>& lambda, std::mt19937_64& rng);
std::vector<double> draw_powerlaw(std::size_t n, double alpha, double x_min, std::mt19937_64& rng);
// log X = mu + sigma Z + E1 / alpha - E2 / beta
std::vector<double> draw_dpln(std::size_t n, double alpha, double beta, double mu, double sigma,
                              std::mt19937_64& rng);
std::vector<double> draw_exponential(std::size_t n, double rate, std::mt19937_64& rng);

} // namespace cgf::oracle
