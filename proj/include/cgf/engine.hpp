#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cgf/cascade_graph.hpp"
#include "cgf/row_store.hpp"

namespace cgf {

// Per-hop transmission probability, 0 < alpha <= 1.
class Attenuation {
public:
    static constexpr double kDefault = 0.5;

    Attenuation() = default;
    explicit Attenuation(double alpha);
    double value() const { return alpha_; }

private:
    double alpha_ = kDefault;
};

// Initial cascade-function value of each seed. Unset means 1 for every seed.
class SeedWeights {
public:
    SeedWeights() = default;
    explicit SeedWeights(std::vector<double> weights);

    double operator()(std::size_t seed) const {
        return weights_.empty() ? 1.0 : weights_.at(seed);
    }
    bool uniform() const { return weights_.empty(); }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

// One nonzero (node, seed) cell of the contagion and length tables.
struct SeedEntry {
    std::uint32_t seed = 0;   // index into CascadeGraph::seeds()
    double contagion = 0.0;   // C_{j,p}(alpha)
    double length = 0.0;      // L_{j,p}(alpha) = alpha * dC/dalpha
};

// N x K contagion and length tables, stored row-sparse: row j holds an entry
// for seed p only if j belongs to p's cascade. Append-only.
class ContagionTable {
public:
    explicit ContagionTable(Attenuation a = {}) : alpha_(a) {}

    double alpha() const { return alpha_.value(); }
    std::size_t rows() const { return entries_.rows(); }
    std::size_t seed_count() const { return seed_labels_.size(); }
    // Label of each seed, indexed by seed.
    std::span<const Label> seed_labels() const { return seed_labels_; }
    std::size_t nonzeros() const { return entries_.size(); }
    std::size_t memory_bytes() const { return entries_.memory_bytes(); }

    std::span<const SeedEntry> row(Label j) const { return entries_.row(j); }
    const SeedEntry* find(Label j, std::size_t seed) const;
    double contagion(Label j, std::size_t seed) const;
    double length(Label j, std::size_t seed) const;

    void reserve(std::size_t rows, std::size_t entries);

    friend bool operator==(const ContagionTable& a, const ContagionTable& b);

private:
    friend class TableAccumulator;

    Attenuation alpha_;
    std::vector<Label> seed_labels_;
    RowStore<SeedEntry> entries_;
};

// The single-row recurrence shared by batch and streaming passes:
//   C_{i,p} = sum_{k -> i} alpha C_{k,p}
//   L_{i,p} = sum_{k -> i} alpha (C_{k,p} + L_{k,p})
// with C=1, L=0 on the seed's own row.
class TableAccumulator {
public:
    void append_row(ContagionTable& table, std::span<const Label> in_edges);

private:
    std::vector<double> c_;
    std::vector<double> l_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint8_t> mark_;
    std::vector<SeedEntry> out_;
};

ContagionTable compute_tables(const CascadeGraph& cg, Attenuation a);

struct PhiSeries {
    ContagionTable f;          // per-node K-vector f(j, i_p, alpha)
    std::vector<double> phi;   // phi(j, alpha) = sum_p f(j, i_p, alpha) w_p
};

PhiSeries phi_series(const CascadeGraph& cg, Attenuation a, const SeedWeights& w = {});
PhiSeries phi_series(ContagionTable table, const SeedWeights& w = {});

// d phi(j, alpha) / d alpha for every label.
std::vector<double> phi_derivative(const ContagionTable& table, const SeedWeights& w = {});
std::vector<double> phi_derivative(const CascadeGraph& cg, Attenuation a, const SeedWeights& w = {});

// Per-seed peak of f over its cascade, tracked in log space so that deep
// cascades whose f overflows a double still rank correctly.
struct CascadePeak {
    std::uint32_t seed = 0;
    double log_max_f = 0.0;
};
std::vector<CascadePeak> cascade_peaks(const CascadeGraph& cg, Attenuation a);

// Real-time computation: activations are pushed one at a time in
// non-decreasing timestamp order. Rows already emitted never change.
class StreamingEngine {
public:
    StreamingEngine(const FollowerGraph& g, Attenuation a, SeedWeights w = {},
                    BuildOptions options = {});

    // Returns the label given to the activation. Throws InputError on an
    // out-of-order timestamp or a repeated node.
    Label push(NodeId node, Timestamp time);

    const ContagionTable& table() const { return table_; }
    const std::vector<double>& phi() const { return phi_; }
    std::size_t size() const { return builder_.size(); }
    CascadeGraph graph() const { return builder_.build(); }

private:
    CascadeGraphBuilder builder_;
    SeedWeights weights_;
    ContagionTable table_;
    TableAccumulator acc_;
    std::vector<double> phi_;
};

} // namespace cgf
