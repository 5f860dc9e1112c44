#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgf/distfit.hpp"
#include "cgf/engine.hpp"
#include "cgf/metrics.hpp"
#include "cgf/tiers.hpp"

namespace cgf::reports {

using Json = nlohmann::ordered_json;

// Labels and seed indices are reported 1-based throughout.

Json metrics_json(const std::string& story, const CascadeGraph& cg, const ProcessMetrics& m, Mode mode);

// label,node_id,timestamp,seed_index,f_value,phi_total; one row per nonzero f
std::string phi_csv(const CascadeGraph& cg, const PhiSeries& s);

// Cascades ordered by their largest f value.
std::string ranking_csv(const CascadeGraph& cg, const ContagionTable& table, const std::vector<CascadePeak>& peaks);

Json reconstruction_json(const std::string& story, const CascadeGraph& cg, const ReconstructedGraph& r);

Json fit_json(const std::vector<distfit::Ranked>& ranked);

// value,empirical_cdf,fitted_cdf at each distinct value
std::string cdf_csv(const distfit::Sample& s, const distfit::FitResult& r);

// Per-cascade populations, keyed by metric name. Only active cascades
// contribute; num_cascades has one row per story.
class Populations {
public:
    static const std::vector<std::string>& cascade_metrics();

    void add(const std::string& story, const CascadeGraph& cg, const ProcessMetrics& m);
    std::map<std::string, std::string> render() const;  // file stem -> CSV text

private:
    struct Row {
        std::string story;
        Label seed = 0;
        NodeId node = 0;
        std::string value;
    };
    std::map<std::string, std::vector<Row>> rows_;
    std::vector<std::pair<std::string, std::size_t>> counts_;
};

} // namespace cgf::reports
