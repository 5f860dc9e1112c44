#include "cgf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "cgf/errors.hpp"

namespace cgf::oracle {

namespace {

void check_bound(const CascadeGraph& cg, std::size_t bound) {
    if (cg.size() > bound) {
        throw DomainError("brute-force oracle refuses " + std::to_string(cg.size()) +
                          " nodes (bound " + std::to_string(bound) + ")");
    }
}

void dfs_paths(const CascadeGraph& cg, Label at, std::uint32_t depth,
               std::vector<PathHistogram>& out) {
    ++out[at][depth];
    for (Label next : cg.out_edges(at)) {
        dfs_paths(cg, next, depth + 1, out);
    }
}

std::uint32_t dfs_longest(const CascadeGraph& cg, Label at) {
    std::uint32_t best = 0;
    for (Label next : cg.out_edges(at)) {
        best = std::max(best, 1 + dfs_longest(cg, next));
    }
    return best;
}

} // namespace

std::vector<PathHistogram> enumerate_paths(const CascadeGraph& cg, Label seed, std::size_t bound) {
    check_bound(cg, bound);
    std::vector<PathHistogram> out(cg.size());
    dfs_paths(cg, seed, 0, out);
    return out;
}

std::vector<bool> reachable_from(const CascadeGraph& cg, Label seed) {
    std::vector<bool> seen(cg.size(), false);
    std::queue<Label> q;
    seen[seed] = true;
    q.push(seed);
    while (!q.empty()) {
        Label u = q.front();
        q.pop();
        for (Label v : cg.out_edges(u)) {
            if (!seen[v]) {
                seen[v] = true;
                q.push(v);
            }
        }
    }
    return seen;
}

std::uint32_t longest_path(const CascadeGraph& cg, std::size_t bound) {
    check_bound(cg, bound);
    std::uint32_t best = 0;
    for (Label s : cg.seeds()) {
        best = std::max(best, dfs_longest(cg, s));
    }
    return best;
}

CascadeGraph random_dag(const DagSpec& spec) {
    std::mt19937_64 rng(spec.random_seed);
    const std::size_t n = spec.nodes;
    std::vector<bool> is_seed(n, false);
    if (n > 0) {
        is_seed[0] = true;
    }
    std::vector<Label> rest(n > 0 ? n - 1 : 0);
    std::iota(rest.begin(), rest.end(), Label{1});
    if (!spec.leading_seeds) {
        std::shuffle(rest.begin(), rest.end(), rng);
    }
    for (std::size_t s = 0; s + 1 < spec.seeds && s < rest.size(); ++s) {
        is_seed[rest[s]] = true;
    }
    std::vector<std::vector<Label>> in(n);
    std::vector<Label> pool;
    for (std::size_t i = 1; i < n; ++i) {
        if (is_seed[i]) {
            continue;
        }
        const std::size_t cap = std::min(spec.max_in_degree, i);
        std::size_t d = cap;
        if (!spec.fixed_degree) {
            d = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
        }
        if (d * 4 < i) {
            // sparse pick by rejection
            while (in[i].size() < d) {
                auto j = static_cast<Label>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
                if (std::find(in[i].begin(), in[i].end(), j) == in[i].end()) {
                    in[i].push_back(j);
                }
            }
        } else {
            pool.resize(i);
            std::iota(pool.begin(), pool.end(), Label{0});
            std::shuffle(pool.begin(), pool.end(), rng);
            in[i].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d));
        }
    }
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), NodeId{1});
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<Timestamp> ts(n);
    std::iota(ts.begin(), ts.end(), 0.0);
    return CascadeGraph::from_in_edges(std::move(ids), std::move(ts), std::move(in));
}

std::pair<FollowerGraph, ActivationLog> to_inputs(const CascadeGraph& cg, const std::string& story) {
    FollowerGraph g;
    ActivationLog log{story, {}};
    for (std::size_t i = 0; i < cg.size(); ++i) {
        const auto l = static_cast<Label>(i);
        g.add_node(cg.node_id(l));
        for (Label j : cg.in_edges(l)) {
            g.add_edge(cg.node_id(l), cg.node_id(j));
        }
        log.records.push_back({cg.node_id(l), cg.timestamp(l)});
    }
    return {std::move(g), std::move(log)};
}

SyntheticCorpus generate(const SyntheticSpec& spec) {
    std::mt19937_64 rng(spec.random_seed);
    SyntheticCorpus out;
    const std::size_t n = spec.nodes;
    std::vector<std::vector<NodeId>> fans(n + 1);
    std::vector<std::pair<NodeId, NodeId>> edges;  // (fan, friend)
    for (NodeId v = 1; v <= n; ++v) {
        out.graph.add_node(v);
        if (n < 2) {
            continue;
        }
        std::size_t d = std::min(spec.degree, n - 1);
        if (spec.degree_model == DegreeModel::UniformUpTo) {
            d = std::uniform_int_distribution<std::size_t>(0, d)(rng);
        }
        std::vector<NodeId> chosen;
        while (chosen.size() < d) {
            NodeId f = std::uniform_int_distribution<NodeId>(1, n)(rng);
            if (f != v && std::find(chosen.begin(), chosen.end(), f) == chosen.end()) {
                chosen.push_back(f);
            }
        }
        for (NodeId f : chosen) {
            out.graph.add_edge(v, f);
            fans[f].push_back(v);
            edges.emplace_back(v, f);
        }
    }

    std::bernoulli_distribution transmit(spec.transmission);
    std::exponential_distribution<double> delay(1.0);
    if (!(spec.seed_window >= 0.0)) {
        throw DomainError("seed window must be non-negative");
    }
    for (std::size_t s = 0; s < spec.stories; ++s) {
        std::vector<double> when(n + 1, -1.0);
        using Event = std::pair<double, NodeId>;
        std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
        const std::size_t k = std::min(spec.seeds, n);
        std::vector<NodeId> ids(n);
        std::iota(ids.begin(), ids.end(), NodeId{1});
        std::shuffle(ids.begin(), ids.end(), rng);
        for (std::size_t i = 0; i < k; ++i) {
            double t0 = 0.0;
            if (!(s == 0 && i == 0) && spec.seed_window > 0.0) {
                t0 = std::uniform_real_distribution<double>(0.0, spec.seed_window)(rng);
            }
            events.emplace(t0, ids[i]);
        }
        ActivationLog log{"story" + std::to_string(s + 1), {}};
        while (!events.empty()) {
            auto [t, v] = events.top();
            events.pop();
            if (when[v] >= 0.0) {
                continue;
            }
            when[v] = t;
            log.records.push_back({v, t});
            for (NodeId fan : fans[v]) {
                if (when[fan] < 0.0 && transmit(rng)) {
                    events.emplace(t + delay(rng), fan);
                }
            }
        }
        // Ground truth by scanning every follower edge.
        std::vector<Activation> order = log.records;
        std::sort(order.begin(), order.end(), [](const Activation& a, const Activation& b) {
            return a.time < b.time || (a.time == b.time && a.node < b.node);
        });
        std::vector<std::int64_t> label(n + 1, -1);
        for (std::size_t i = 0; i < order.size(); ++i) {
            label[order[i].node] = static_cast<std::int64_t>(i);
        }
        std::vector<std::vector<Label>> in(order.size());
        for (auto [fan, fr] : edges) {
            if (label[fan] >= 0 && label[fr] >= 0 && when[fr] < when[fan]) {
                in[static_cast<std::size_t>(label[fan])].push_back(static_cast<Label>(label[fr]));
            }
        }
        std::vector<NodeId> node_ids;
        std::vector<Timestamp> ts;
        for (const auto& a : order) {
            node_ids.push_back(a.node);
            ts.push_back(a.time);
        }
        out.truth.push_back(CascadeGraph::from_in_edges(std::move(node_ids), std::move(ts), std::move(in)));
        out.logs.push_back(std::move(log));
    }
    return out;
}

std::vector<double> draw_lognormal(std::size_t n, double mu, double sigma, std::mt19937_64& rng) {
    std::lognormal_distribution<double> d(mu, sigma);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = d(rng);
    }
    return x;
}

std::vector<double> draw_weibull(std::size_t n, double k, double lambda, double eta,
                                 std::mt19937_64& rng) {
    std::weibull_distribution<double> d(k, lambda);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = eta + d(rng);
    }
    return x;
}

std::vector<double> draw_weibull_mixture(std::size_t n, const std::vector<double>& weights,
                                         const std::vector<double>& k,
                                         const std::vector<double>& lambda, std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<double> x(n);
    for (auto& v : x) {
        const auto c = pick(rng);
        v = std::weibull_distribution<double>(k[c], lambda[c])(rng);
    }
    return x;
}

std::vector<double> draw_powerlaw(std::size_t n, double alpha, double x_min, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = x_min * std::pow(1.0 - u(rng), -1.0 / (alpha - 1.0));
    }
    return x;
}

std::vector<double> draw_dpln(std::size_t n, double alpha, double beta, double mu, double sigma,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(n);
    for (auto& v : x) {
        const double g = z(rng);
        const double up = e(rng);
        const double down = e(rng);
        v = std::exp(mu + sigma * g + up / alpha - down / beta);
    }
    return x;
}

std::vector<double> draw_exponential(std::size_t n, double rate, std::mt19937_64& rng) {
    std::exponential_distribution<double> d(rate);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = d(rng);
    }
    return x;
}

} // namespace cgf::oracle
