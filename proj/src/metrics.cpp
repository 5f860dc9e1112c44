#include "cgf/metrics.hpp"

#include <algorithm>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cgf/errors.hpp"
#include "cgf/row_store.hpp"

namespace cgf {

std::vector<std::vector<Label>> cascade_membership(const ContagionTable& table) {
    std::vector<std::vector<Label>> members(table.seed_count());
    for (std::size_t j = 0; j < table.rows(); ++j) {
        for (const auto& e : table.row(static_cast<Label>(j))) {
            if (e.contagion > 0.0) {
                members[e.seed].push_back(static_cast<Label>(j));
            }
        }
    }
    return members;
}

std::vector<std::vector<Label>> cascade_membership(const PathProfile& profile) {
    std::vector<std::vector<Label>> members(profile.seed_count());
    for (std::size_t j = 0; j < profile.rows(); ++j) {
        for (const auto& e : profile.row(static_cast<Label>(j))) {
            members[e.seed].push_back(static_cast<Label>(j));
        }
    }
    return members;
}

std::vector<std::size_t> spread(const CascadeGraph& cg,
                                const std::vector<std::vector<Label>>& membership) {
    std::vector<std::size_t> out(membership.size(), 0);
    for (std::size_t p = 0; p < membership.size(); ++p) {
        // A cascade is closed under out-edges, so every fan of a member is a member.
        for (Label u : membership[p]) {
            out[p] = std::max(out[p], cg.out_degree(u));
        }
    }
    return out;
}

Total& Total::operator+=(const Total& o) {
    value += o.value;
    if (exact && o.exact) {
        *exact += *o.exact;
    } else {
        exact.reset();
    }
    return *this;
}

std::optional<double> PathStats::average_length() const {
    if (total_paths.exact && total_length.exact) {
        if (total_paths.exact->is_zero()) {
            return std::nullopt;
        }
        // Ratio of two exact integers, rounded once.
        using Float = boost::multiprecision::cpp_bin_float_double;
        return static_cast<double>(Float(total_length.exact->to_wide()) /
                                   Float(total_paths.exact->to_wide()));
    }
    if (total_paths.value <= 0.0) {
        return std::nullopt;
    }
    return total_length.value / total_paths.value;
}

PathStatsReport path_stats(const ContagionTable& table_at_one) {
    if (table_at_one.alpha() != 1.0) {
        throw DomainError("path statistics need tables computed at alpha = 1");
    }
    PathStatsReport r;
    r.per_cascade.resize(table_at_one.seed_count());
    auto seeds = table_at_one.seed_labels();
    for (std::size_t j = 0; j < table_at_one.rows(); ++j) {
        for (const auto& e : table_at_one.row(static_cast<Label>(j))) {
            if (seeds[e.seed] == j) {
                continue;  // the seed's empty path to itself
            }
            r.per_cascade[e.seed].total_paths.value += e.contagion;
            r.per_cascade[e.seed].total_length.value += e.length;
        }
    }
    for (const auto& c : r.per_cascade) {
        r.process.total_paths += c.total_paths;
        r.process.total_length += c.total_length;
    }
    return r;
}

PathStatsReport path_stats(const PathProfile& profile) {
    PathStatsReport r;
    r.per_cascade.assign(profile.seed_count(), PathStats{Total{0.0, PathCount{}}, Total{0.0, PathCount{}}});
    for (std::size_t j = 0; j < profile.rows(); ++j) {
        for (const auto& e : profile.row(static_cast<Label>(j))) {
            // Only a seed's own row has a degree-0 term.
            PathCount paths = e.poly.total() - e.poly.coefficient(0);
            PathCount length = e.poly.weighted_total();
            auto& s = r.per_cascade[e.seed];
            *s.total_paths.exact += paths;
            *s.total_length.exact += length;
        }
    }
    for (auto& c : r.per_cascade) {
        c.total_paths.value = c.total_paths.exact->to_double();
        c.total_length.value = c.total_length.exact->to_double();
    }
    r.process = PathStats{Total{0.0, PathCount{}}, Total{0.0, PathCount{}}};
    for (const auto& c : r.per_cascade) {
        r.process.total_paths += c.total_paths;
        r.process.total_length += c.total_length;
    }
    return r;
}

DiameterReport diameter(const CascadeGraph& cg) {
    DiameterReport r;
    const std::size_t n = cg.size();
    const std::size_t k = cg.seeds().size();
    r.depth.assign(n, 0);
    r.per_cascade.assign(k, 0);
    // Row-sparse (seed, longest path from that seed) pairs.
    using Entry = std::pair<std::uint32_t, std::uint32_t>;
    RowStore<Entry> entries;
    entries.reserve(n, n + k);
    std::vector<Entry> out;
    std::vector<std::uint32_t> best(k, 0);
    std::vector<std::uint8_t> mark(k, 0);
    std::vector<std::uint32_t> touched;
    std::uint32_t next_seed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto in = cg.in_edges(static_cast<Label>(i));
        if (in.empty()) {
            const Entry self{next_seed++, 0};
            entries.append({&self, 1});
            continue;
        }
        touched.clear();
        std::uint32_t e_max = 0;
        for (Label from : in) {
            e_max = std::max(e_max, r.depth[from] + 1);
            for (auto [p, len] : entries.row(from)) {
                if (!mark[p]) {
                    mark[p] = 1;
                    best[p] = 0;
                    touched.push_back(p);
                }
                best[p] = std::max(best[p], len + 1);
            }
        }
        r.depth[i] = e_max;
        r.process = std::max(r.process, e_max);
        std::sort(touched.begin(), touched.end());
        out.clear();
        for (auto p : touched) {
            out.emplace_back(p, best[p]);
            r.per_cascade[p] = std::max(r.per_cascade[p], best[p]);
            mark[p] = 0;
        }
        entries.append(out);
    }
    return r;
}

ProcessMetrics compute_metrics(const CascadeGraph& cg, Mode mode, ExactOptions exact) {
    ProcessMetrics m;
    m.size = cg.size();
    m.num_seeds = cg.seeds().size();
    std::vector<std::vector<Label>> members;
    PathStatsReport stats;
    if (mode == Mode::Exact) {
        const auto profile = compute_path_profiles(cg, exact);
        members = cascade_membership(profile);
        stats = path_stats(profile);
    } else {
        const auto table = compute_tables(cg, Attenuation(1.0));
        members = cascade_membership(table);
        stats = path_stats(table);
    }
    const auto spreads = spread(cg, members);
    const auto diam = diameter(cg);
    m.cascades.resize(m.num_seeds);
    for (std::size_t p = 0; p < m.num_seeds; ++p) {
        auto& c = m.cascades[p];
        c.seed = cg.seeds()[p];
        c.seed_node = cg.node_id(c.seed);
        c.active = cg.out_degree(c.seed) > 0;
        c.size = members[p].size();
        c.spread = spreads[p];
        c.diameter = diam.per_cascade[p];
        c.paths = stats.per_cascade[p];
        m.num_cascades += c.active ? 1 : 0;
        m.spread = std::max(m.spread, c.spread);
    }
    m.diameter = diam.process;
    m.paths = stats.process;
    return m;
}

} // namespace cgf
