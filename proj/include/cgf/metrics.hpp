#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgf/cascade_graph.hpp"
#include "cgf/engine.hpp"
#include "cgf/path_profile.hpp"

namespace cgf {

// Member labels (sorted, seed included) of every cascade, indexed by seed.
// A node can appear in several cascades.
std::vector<std::vector<Label>> cascade_membership(const ContagionTable& table);
std::vector<std::vector<Label>> cascade_membership(const PathProfile& profile);

// Per cascade: the largest number of fellow members any one member activates.
std::vector<std::size_t> spread(const CascadeGraph& cg,
                                const std::vector<std::vector<Label>>& membership);

// A path total: exact when it came from path profiles, otherwise a double
// read off the alpha = 1 tables.
struct Total {
    double value = 0.0;
    std::optional<PathCount> exact;

    Total& operator+=(const Total& o);
};

struct PathStats {
    Total total_paths;
    Total total_length;
    // Absent when there are no paths.
    std::optional<double> average_length() const;
};

struct PathStatsReport {
    std::vector<PathStats> per_cascade;
    PathStats process;
};

// Seed self-paths are excluded. The table must have been computed at alpha = 1.
PathStatsReport path_stats(const ContagionTable& table_at_one);
PathStatsReport path_stats(const PathProfile& profile);

struct DiameterReport {
    std::vector<std::uint32_t> per_cascade;
    std::uint32_t process = 0;
    // Longest path from any seed to each label; e(seed) = 0.
    std::vector<std::uint32_t> depth;
};

DiameterReport diameter(const CascadeGraph& cg);

struct CascadeMetrics {
    Label seed = 0;
    NodeId seed_node = 0;
    bool active = false;
    std::size_t size = 0;
    std::size_t spread = 0;
    std::uint32_t diameter = 0;
    PathStats paths;
};

struct ProcessMetrics {
    std::vector<CascadeMetrics> cascades;  // one per seed, label order
    std::size_t size = 0;
    std::size_t spread = 0;
    std::uint32_t diameter = 0;
    PathStats paths;
    std::size_t num_cascades = 0;  // active seeds
    std::size_t num_seeds = 0;
};

enum class Mode { Numeric, Exact };

ProcessMetrics compute_metrics(const CascadeGraph& cg, Mode mode = Mode::Numeric,
                               ExactOptions exact = {});

} // namespace cgf
