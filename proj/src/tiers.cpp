#include "cgf/tiers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>
#include <boost/graph/strong_components.hpp>

#include "cgf/errors.hpp"

namespace cgf {

namespace {

using Row = std::vector<ProfileEntry>;

std::size_t hash_row(std::span<const ProfileEntry> row) {
    std::size_t h = row.size();
    for (const auto& e : row) {
        h ^= e.seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= e.poly.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

bool same_row(std::span<const ProfileEntry> a, std::span<const ProfileEntry> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::string label_text(Label j) { return std::to_string(j + 1); }

// Largest m with m * f <= r entrywise, or 0 if f has a seed r lacks.
std::uint64_t max_multiple(const Row& r, std::span<const ProfileEntry> f, std::uint64_t cap) {
    std::uint64_t best = cap;
    auto it = r.begin();
    for (const auto& e : f) {
        while (it != r.end() && it->seed < e.seed) {
            ++it;
        }
        if (it == r.end() || it->seed != e.seed) {
            return 0;
        }
        const PathCount m = it->poly.max_multiple(e.poly);
        const auto small = m.to_u64();
        if (small && *small < best) {
            best = *small;
        }
        if (best == 0) {
            return 0;
        }
    }
    return best;
}

Row subtract(const Row& r, std::span<const ProfileEntry> f, std::uint64_t m) {
    Row out = r;
    auto it = out.begin();
    for (const auto& e : f) {
        while (it->seed < e.seed) {
            ++it;
        }
        it->poly.subtract(e.poly, PathCount(m));
    }
    std::erase_if(out, [](const ProfileEntry& e) { return e.poly.empty(); });
    return out;
}

// (tier, multiplicity) pairs, tier ascending
using Choice = std::vector<std::pair<std::size_t, std::uint64_t>>;

struct NodeSolutions {
    std::vector<Choice> choices;
    bool complete = true;
};

struct Candidate {
    std::size_t tier;
    std::uint64_t avail;
};

class Decomposer {
public:
    Decomposer(const PathProfile& profile, const TierPartition& tiers, const ReconstructOptions& opt)
        : profile_(profile), tiers_(tiers), opt_(opt) {}

    NodeSolutions solve(const Row& target, std::vector<Candidate> cands, std::optional<std::uint32_t> in_degree) {
        cands_ = std::move(cands);
        in_degree_ = in_degree;
        failed_.clear();
        out_ = {};
        visits_ = 0;
        current_.clear();
        search(0, target, in_degree.value_or(0));
        for (auto& c : out_.choices) {
            std::sort(c.begin(), c.end());
        }
        return std::move(out_);
    }

private:
    struct State {
        std::size_t idx;
        std::uint32_t budget;
        Row rest;
        bool operator==(const State& o) const {
            return idx == o.idx && budget == o.budget && same_row(rest, o.rest);
        }
    };
    struct StateHash {
        std::size_t operator()(const State& s) const {
            return hash_row(s.rest) ^ (s.idx * 0x9e3779b97f4a7c15ULL) ^ (std::size_t{s.budget} << 32);
        }
    };

    std::span<const ProfileEntry> key(std::size_t tier) const { return profile_.row(tiers_.tiers[tier].front()); }

    bool full() const { return out_.choices.size() >= opt_.max_solutions || !out_.complete; }

    // True when at least one decomposition was found below this state.
    bool search(std::size_t idx, const Row& rest, std::uint32_t budget) {
        if (rest.empty()) {
            if (in_degree_ && budget != 0) {
                return false;
            }
            if (out_.choices.size() >= opt_.max_solutions) {
                out_.complete = false;
            } else {
                out_.choices.push_back(current_);
            }
            return true;
        }
        if (idx == cands_.size() || (in_degree_ && budget == 0)) {
            return false;
        }
        if (++visits_ > opt_.node_budget) {
            out_.complete = false;
            return false;
        }
        State st{idx, budget, rest};
        if (failed_.contains(st)) {
            return false;
        }
        const auto& c = cands_[idx];
        std::uint64_t top = std::min<std::uint64_t>(c.avail, max_multiple(rest, key(c.tier), c.avail));
        if (in_degree_) {
            top = std::min<std::uint64_t>(top, budget);
        }
        bool found = false;
        for (std::uint64_t m = top + 1; m-- > 0;) {
            if (full()) {
                break;
            }
            if (m > 0) {
                current_.emplace_back(c.tier, m);
                found |= search(idx + 1, subtract(rest, key(c.tier), m),
                                budget - static_cast<std::uint32_t>(in_degree_ ? m : 0));
                current_.pop_back();
            } else {
                found |= search(idx + 1, rest, budget);
            }
        }
        if (!found && out_.complete) {
            failed_.insert(std::move(st));
        }
        return found;
    }

    const PathProfile& profile_;
    const TierPartition& tiers_;
    const ReconstructOptions& opt_;
    std::vector<Candidate> cands_;
    std::optional<std::uint32_t> in_degree_;
    std::unordered_set<State, StateHash> failed_;
    NodeSolutions out_;
    Choice current_;
    std::size_t visits_ = 0;
};

// Members of `tier` that may feed a node activated strictly after labels
// [0, bound) and, with out-degree hints, still have fans to give.
std::vector<Label> available(const TierPartition& tp, std::size_t tier, Label bound, const DegreeHints& hints) {
    std::vector<Label> out;
    for (Label k : tp.tiers[tier]) {
        if (k >= bound) {
            break;
        }
        if (hints.out_degree.empty() || hints.out_degree[k] > 0) {
            out.push_back(k);
        }
    }
    return out;
}

struct FlowResult {
    bool feasible = false;
    std::vector<ReconstructedEdge> edges;  // Exact marks arcs present in every assignment
};

// Assigns concrete parents given per-node tier multiplicities and per-node
// out-degree capacities, via max flow. An arc is forced iff it carries flow
// and no residual cycle passes through it.
FlowResult assign_parents(const std::vector<Choice>& chosen, const std::vector<Label>& bound,
                          const TierPartition& tp, const DegreeHints& hints) {
    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
    using Graph = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS, boost::no_property,
        boost::property<boost::edge_capacity_t, long,
                        boost::property<boost::edge_residual_capacity_t, long,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    using Edge = Traits::edge_descriptor;

    const std::size_t n = chosen.size();
    Graph g(n + 2);
    const std::size_t source = n, sink = n + 1;
    auto cap = get(boost::edge_capacity, g);
    auto rev = get(boost::edge_reverse, g);
    auto res = get(boost::edge_residual_capacity, g);
    auto add = [&](std::size_t u, std::size_t v, long c) {
        Edge e = boost::add_edge(u, v, g).first;
        Edge r = boost::add_edge(v, u, g).first;
        cap[e] = c;
        cap[r] = 0;
        rev[e] = r;
        rev[r] = e;
        return e;
    };

    struct Arc {
        Edge e;
        Label from, to;
        std::size_t demand_vertex;
    };
    std::vector<Arc> arcs;
    long demand = 0;
    for (Label k = 0; k < n; ++k) {
        if (hints.out_degree[k] > 0) {
            add(source, k, hints.out_degree[k]);
        }
    }
    for (Label j = 0; j < n; ++j) {
        for (auto [t, m] : chosen[j]) {
            const std::size_t dv = boost::add_vertex(g);
            add(dv, sink, static_cast<long>(m));
            demand += static_cast<long>(m);
            for (Label k : available(tp, t, bound[j], hints)) {
                arcs.push_back({add(k, dv, 1), k, j, dv});
            }
        }
    }
    const long flow = boost::push_relabel_max_flow(g, source, sink);
    FlowResult out;
    if (flow != demand) {
        return out;
    }
    out.feasible = true;

    // residual graph without the terminals
    using Plain = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Plain r(num_vertices(g));
    for (auto [it, end] = boost::edges(g); it != end; ++it) {
        const auto u = boost::source(*it, g), v = boost::target(*it, g);
        if (res[*it] > 0 && u != source && u != sink && v != source && v != sink) {
            boost::add_edge(u, v, r);
        }
    }
    std::vector<std::size_t> comp(num_vertices(r));
    boost::strong_components(r, boost::make_iterator_property_map(comp.begin(), get(boost::vertex_index, r)));
    for (const auto& a : arcs) {
        if (cap[a.e] - res[a.e] == 1) {
            const bool forced = comp[a.from] != comp[a.demand_vertex];
            out.edges.push_back({a.from, a.to, forced ? EdgeConfidence::Exact : EdgeConfidence::TierAmbiguous});
        }
    }
    return out;
}

void sort_edges(std::vector<ReconstructedEdge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.to, a.from) < std::tie(b.to, b.from);
    });
}

} // namespace

TierPartition tier_partition(const PathProfile& profile) {
    TierPartition tp;
    tp.tier_of.resize(profile.rows());
    std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;
    for (Label j = 0; j < profile.rows(); ++j) {
        auto& bucket = buckets[hash_row(profile.row(j))];
        std::optional<std::size_t> hit;
        for (std::size_t t : bucket) {
            if (same_row(profile.row(tp.tiers[t].front()), profile.row(j))) {
                hit = t;
                break;
            }
        }
        if (!hit) {
            hit = tp.tiers.size();
            tp.tiers.emplace_back();
            bucket.push_back(*hit);
        }
        tp.tiers[*hit].push_back(j);
        tp.tier_of[j] = *hit;
    }
    return tp;
}

TierPartition tier_partition(const CascadeGraph& cg, ExactOptions options) {
    try {
        return tier_partition(compute_path_profiles(cg, options));
    } catch (const OverflowError& e) {
        throw CapabilityError(std::string("tier detection needs exact path profiles: ") + e.what());
    }
}

DegreeHints DegreeHints::from_graph(const CascadeGraph& cg) {
    DegreeHints h;
    for (Label j = 0; j < cg.size(); ++j) {
        h.in_degree.push_back(static_cast<std::uint32_t>(cg.in_degree(j)));
        h.out_degree.push_back(static_cast<std::uint32_t>(cg.out_degree(j)));
    }
    return h;
}

const char* to_string(EdgeConfidence c) {
    return c == EdgeConfidence::Exact ? "exact" : "tier-ambiguous";
}

std::size_t ReconstructedGraph::exact_edge_count() const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const auto& e) {
        return e.confidence == EdgeConfidence::Exact;
    }));
}

bool ReconstructedGraph::node_level_exact() const {
    return exact_edge_count() == edges.size() && std::all_of(resolved.begin(), resolved.end(), [](bool b) { return b; });
}

CascadeGraph ReconstructedGraph::to_cascade_graph(std::span<const NodeId> node_ids) const {
    std::vector<std::vector<Label>> in(size());
    for (const auto& e : edges) {
        in[e.to].push_back(e.from);
    }
    return CascadeGraph::from_in_edges({node_ids.begin(), node_ids.end()}, times, in);
}

ReconstructedGraph reconstruct(const PathProfile& profile, std::span<const Timestamp> times,
                               const DegreeHints& hints, ReconstructOptions options) {
    const std::size_t n = profile.rows();
    if (times.size() != n) {
        throw InputError("reconstruction needs one timestamp per profile row");
    }
    if ((!hints.in_degree.empty() && hints.in_degree.size() != n) ||
        (!hints.out_degree.empty() && hints.out_degree.size() != n)) {
        throw InputError("degree hints must cover every node");
    }
    for (std::size_t j = 1; j < n; ++j) {
        if (times[j] < times[j - 1]) {
            throw InputError("timestamps must be in activation order");
        }
    }

    ReconstructedGraph out;
    out.times.assign(times.begin(), times.end());
    out.tiers = tier_partition(profile);
    out.resolved.assign(n, true);
    const TierPartition& tp = out.tiers;

    // labels [0, bound[j]) are strictly earlier than j
    std::vector<Label> bound(n);
    for (Label j = 0; j < n; ++j) {
        bound[j] = static_cast<Label>(std::lower_bound(times.begin(), times.end(), times[j]) - times.begin());
    }

    // candidate index: tiers by (first seed, lowest degree there)
    std::map<std::pair<std::uint32_t, std::size_t>, std::vector<std::size_t>> index;
    for (std::size_t t = 0; t < tp.size(); ++t) {
        const auto& first = profile.row(tp.tiers[t].front()).front();
        index[{first.seed, first.poly.min_degree()}].push_back(t);
    }

    Decomposer dec(profile, tp, options);
    std::vector<NodeSolutions> sols(n);
    std::vector<bool> is_seed(n, false);
    for (Label j = 0; j < n; ++j) {
        const auto row = profile.row(j);
        if (row.empty()) {
            throw ReconstructionError("node " + label_text(j) + " has an empty profile", j);
        }
        const bool any_constant = std::any_of(row.begin(), row.end(), [](const auto& e) { return e.poly.min_degree() == 0; });
        if (any_constant) {
            if (row.size() != 1 || !(row[0].poly == Polynomial::unit())) {
                throw ReconstructionError("node " + label_text(j) + " mixes a seed term with paths", j);
            }
            if (!hints.in_degree.empty() && hints.in_degree[j] != 0) {
                throw ReconstructionError("seed node " + label_text(j) + " has a nonzero in-degree hint", j);
            }
            is_seed[j] = true;
            out.seeds.push_back(j);
            continue;
        }
        Row target;
        for (const auto& e : row) {
            target.push_back({e.seed, e.poly.shifted_down()});
        }
        std::vector<Candidate> cands;
        for (const auto& e : target) {
            for (std::size_t d = e.poly.min_degree(); d <= e.poly.max_degree(); ++d) {
                auto it = index.find({e.seed, d});
                if (it == index.end()) {
                    continue;
                }
                for (std::size_t t : it->second) {
                    const auto avail = available(tp, t, bound[j], hints).size();
                    if (avail > 0 && max_multiple(target, profile.row(tp.tiers[t].front()), 1) > 0) {
                        cands.push_back({t, avail});
                    }
                }
            }
        }
        // latest tiers first
        std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
            return tp.tiers[a.tier].front() > tp.tiers[b.tier].front();
        });
        std::optional<std::uint32_t> in_hint;
        if (!hints.in_degree.empty()) {
            in_hint = hints.in_degree[j];
        }
        sols[j] = dec.solve(target, std::move(cands), in_hint);
        if (sols[j].choices.empty()) {
            if (sols[j].complete) {
                throw ReconstructionError("no decomposition of node " + label_text(j) +
                                              " into earlier profiles", j);
            }
            out.resolved[j] = false;
        } else if (!sols[j].complete) {
            out.resolved[j] = false;
        }
    }

    const bool all_complete = std::all_of(out.resolved.begin(), out.resolved.end(), [](bool b) { return b; });

    if (!hints.out_degree.empty() && all_complete) {
        // joint choice of decompositions that meets every tier's fan total
        std::vector<long> cap(tp.size(), 0), used(tp.size(), 0);
        for (Label k = 0; k < n; ++k) {
            cap[tp.tier_of[k]] += hints.out_degree[k];
        }
        std::vector<Label> open;
        std::vector<Choice> chosen(n);
        for (Label j = 0; j < n; ++j) {
            if (is_seed[j]) {
                continue;
            }
            if (sols[j].choices.size() == 1) {
                chosen[j] = sols[j].choices[0];
                for (auto [t, m] : chosen[j]) {
                    used[t] += static_cast<long>(m);
                }
            } else {
                open.push_back(j);
            }
        }
        std::size_t tried = 0, feasible = 0;
        bool truncated = false;
        std::optional<std::vector<ReconstructedEdge>> first;
        std::map<std::pair<Label, Label>, std::size_t> forced;

        auto leaf = [&] {
            if (used != cap) {
                return;
            }
            if (++tried > options.max_combinations) {
                truncated = true;
                return;
            }
            auto fr = assign_parents(chosen, bound, tp, hints);
            if (!fr.feasible) {
                return;
            }
            ++feasible;
            for (const auto& e : fr.edges) {
                if (e.confidence == EdgeConfidence::Exact) {
                    ++forced[{e.from, e.to}];
                }
            }
            if (!first) {
                first = std::move(fr.edges);
            }
        };
        auto walk = [&](auto&& self, std::size_t i) -> void {
            if (truncated) {
                return;
            }
            if (i == open.size()) {
                leaf();
                return;
            }
            const Label j = open[i];
            for (const auto& c : sols[j].choices) {
                bool ok = true;
                for (auto [t, m] : c) {
                    used[t] += static_cast<long>(m);
                    ok &= used[t] <= cap[t];
                }
                if (ok) {
                    chosen[j] = c;
                    self(self, i + 1);
                }
                for (auto [t, m] : c) {
                    used[t] -= static_cast<long>(m);
                }
            }
        };
        walk(walk, 0);

        if (feasible == 0 && !truncated) {
            const Label where = open.empty() ? (n > 0 ? static_cast<Label>(n - 1) : 0) : open.front();
            throw ReconstructionError("degree hints contradict every decomposition", where);
        }
        if (!truncated) {
            out.edges = std::move(*first);
            for (auto& e : out.edges) {
                auto it = forced.find({e.from, e.to});
                e.confidence = (it != forced.end() && it->second == feasible) ? EdgeConfidence::Exact
                                                                              : EdgeConfidence::TierAmbiguous;
            }
            sort_edges(out.edges);
            return out;
        }
    }

    // per-node rule: a tier's members are certain parents when every
    // decomposition takes all of them
    for (Label j = 0; j < n; ++j) {
        if (is_seed[j] || sols[j].choices.empty()) {
            continue;
        }
        const auto& pick = sols[j].choices.front();
        for (auto [t, m] : pick) {
            const auto members = available(tp, t, bound[j], hints);
            bool certain = out.resolved[j];
            for (const auto& other : sols[j].choices) {
                auto it = std::find_if(other.begin(), other.end(), [t = t](const auto& p) { return p.first == t; });
                certain &= it != other.end() && it->second == members.size();
            }
            for (std::size_t i = 0; i < m; ++i) {
                out.edges.push_back({members[i], j, certain ? EdgeConfidence::Exact : EdgeConfidence::TierAmbiguous});
            }
        }
    }
    sort_edges(out.edges);
    return out;
}

TierMultigraph tier_collapse(const CascadeGraph& cg, const TierPartition& tiers) {
    TierMultigraph m;
    for (Label j = 0; j < cg.size(); ++j) {
        for (Label k : cg.in_edges(j)) {
            ++m[{tiers.tier_of[k], tiers.tier_of[j]}];
        }
    }
    return m;
}

TierMultigraph tier_collapse(const ReconstructedGraph& g) {
    TierMultigraph m;
    for (const auto& e : g.edges) {
        ++m[{g.tiers.tier_of[e.from], g.tiers.tier_of[e.to]}];
    }
    return m;
}

} // namespace cgf
