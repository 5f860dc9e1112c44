#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cgf/cascade_graph.hpp"
#include "cgf/path_profile.hpp"

namespace cgf {

// Nodes grouped by identical exact profile rows. Tiers are ordered by their
// smallest member label; members are sorted.
struct TierPartition {
    std::vector<std::vector<Label>> tiers;
    std::vector<std::size_t> tier_of;  // label -> tier index

    std::size_t size() const { return tiers.size(); }
    friend bool operator==(const TierPartition&, const TierPartition&) = default;
};

TierPartition tier_partition(const PathProfile& profile);
// Throws CapabilityError when exact profiles cannot be formed under `options`.
TierPartition tier_partition(const CascadeGraph& cg, ExactOptions options = {});

// Optional side information. Empty vectors mean unknown.
struct DegreeHints {
    std::vector<std::uint32_t> in_degree;
    std::vector<std::uint32_t> out_degree;

    static DegreeHints from_graph(const CascadeGraph& cg);
    bool empty() const { return in_degree.empty() && out_degree.empty(); }
};

struct ReconstructOptions {
    std::size_t max_solutions = 32;        // decompositions kept per node
    std::size_t node_budget = 200000;      // search states per node
    std::size_t max_combinations = 256;    // joint choices tried against out-degree hints
};

enum class EdgeConfidence { Exact, TierAmbiguous };

const char* to_string(EdgeConfidence c);

struct ReconstructedEdge {
    Label from = 0;
    Label to = 0;
    EdgeConfidence confidence = EdgeConfidence::TierAmbiguous;
    friend bool operator==(const ReconstructedEdge&, const ReconstructedEdge&) = default;
};

struct ReconstructedGraph {
    std::vector<Timestamp> times;
    TierPartition tiers;
    std::vector<Label> seeds;
    std::vector<ReconstructedEdge> edges;  // sorted by (to, from)
    // False where the search budget ran out before every decomposition was seen.
    std::vector<bool> resolved;

    std::size_t size() const { return times.size(); }
    std::size_t exact_edge_count() const;
    bool node_level_exact() const;  // every edge exact and every node resolved
    CascadeGraph to_cascade_graph(std::span<const NodeId> node_ids) const;
};

// Infers parents of each node by writing its profile row as alpha times a
// sum of earlier rows. Throws ReconstructionError when some row has no
// decomposition or the hints contradict every one.
ReconstructedGraph reconstruct(const PathProfile& profile, std::span<const Timestamp> times,
                               const DegreeHints& hints = {}, ReconstructOptions options = {});

// Edge multiplicities between tiers: (from tier, to tier) -> count.
using TierMultigraph = std::map<std::pair<std::size_t, std::size_t>, std::size_t>;

TierMultigraph tier_collapse(const CascadeGraph& cg, const TierPartition& tiers);
TierMultigraph tier_collapse(const ReconstructedGraph& g);

} // namespace cgf
