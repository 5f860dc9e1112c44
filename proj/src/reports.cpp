#include "cgf/reports.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cgf/csv_io.hpp"

namespace cgf::reports {

namespace {

using io::format_double;

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
}

Json total_json(const Total& t) {
    if (t.exact) {
        if (auto v = t.exact->to_u64()) {
            return *v;
        }
        return t.exact->to_string();  // beyond 64 bits: decimal string
    }
    if (t.value >= 0 && t.value < 9.2e18 && t.value == std::floor(t.value)) {
        return static_cast<std::uint64_t>(t.value);
    }
    return t.value;
}

std::string total_text(const Total& t) {
    if (t.exact) {
        return t.exact->to_string();
    }
    if (t.value >= 0 && t.value < 9.2e18 && t.value == std::floor(t.value)) {
        return std::to_string(static_cast<std::uint64_t>(t.value));
    }
    return format_double(t.value);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace

Json metrics_json(const std::string& story, const CascadeGraph& cg, const ProcessMetrics& m, Mode mode) {
    Json j;
    j["story_id"] = story;
    j["mode"] = mode == Mode::Exact ? "exact" : "numeric";
    j["nodes"] = cg.size();
    j["size"] = m.size;
    j["spread"] = m.spread;
    j["diameter"] = m.diameter;
    j["total_paths"] = total_json(m.paths.total_paths);
    j["total_path_length"] = total_json(m.paths.total_length);
    j["avg_path_length"] = optional_json(m.paths.average_length());
    j["num_cascades"] = m.num_cascades;
    j["num_seeds"] = m.num_seeds;
    Json arr = Json::array();
    for (std::size_t p = 0; p < m.cascades.size(); ++p) {
        const auto& c = m.cascades[p];
        Json e;
        e["seed_index"] = p + 1;
        e["seed_label"] = c.seed + 1;
        e["seed_node_id"] = c.seed_node;
        e["active"] = c.active;
        e["size"] = c.size;
        e["spread"] = c.spread;
        e["diameter"] = c.diameter;
        e["total_paths"] = total_json(c.paths.total_paths);
        e["total_path_length"] = total_json(c.paths.total_length);
        e["avg_path_length"] = optional_json(c.paths.average_length());
        arr.push_back(std::move(e));
    }
    j["cascades"] = std::move(arr);
    return j;
}

std::string phi_csv(const CascadeGraph& cg, const PhiSeries& s) {
    std::ostringstream out;
    out << "label,node_id,timestamp,seed_index,f_value,phi_total\n";
    for (Label j = 0; j < cg.size(); ++j) {
        const std::string tail = "," + format_double(s.phi[j]) + "\n";
        for (const auto& e : s.f.row(j)) {
            out << j + 1 << ',' << cg.node_id(j) << ',' << format_double(cg.timestamp(j)) << ',' << e.seed + 1
                << ',' << format_double(e.contagion) << tail;
        }
    }
    return out.str();
}

std::string ranking_csv(const CascadeGraph& cg, const ContagionTable& table, const std::vector<CascadePeak>& peaks) {
    std::vector<std::size_t> size(peaks.size(), 0);
    for (Label j = 0; j < table.rows(); ++j) {
        for (const auto& e : table.row(j)) {
            ++size[e.seed];
        }
    }
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return peaks[a].log_max_f > peaks[b].log_max_f; });
    std::ostringstream out;
    out << "rank,seed_index,seed_label,seed_node_id,size,max_f,log_max_f\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto p = order[r];
        const Label seed = cg.seeds()[p];
        out << r + 1 << ',' << p + 1 << ',' << seed + 1 << ',' << cg.node_id(seed) << ',' << size[p] << ','
            << format_double(std::exp(peaks[p].log_max_f)) << ',' << format_double(peaks[p].log_max_f) << '\n';
    }
    return out.str();
}

Json reconstruction_json(const std::string& story, const CascadeGraph& cg, const ReconstructedGraph& r) {
    Json j;
    j["story_id"] = story;
    j["nodes"] = r.size();
    j["node_level_exact"] = r.node_level_exact();
    j["exact_edges"] = r.exact_edge_count();
    Json edges = Json::array();
    for (const auto& e : r.edges) {
        edges.push_back({{"from", e.from + 1},
                         {"to", e.to + 1},
                         {"from_node", cg.node_id(e.from)},
                         {"to_node", cg.node_id(e.to)},
                         {"confidence", to_string(e.confidence)}});
    }
    j["edges"] = std::move(edges);
    Json tiers = Json::array();
    for (const auto& t : r.tiers.tiers) {
        Json members = Json::array();
        for (Label l : t) {
            members.push_back(l + 1);
        }
        tiers.push_back(std::move(members));
    }
    j["tiers"] = std::move(tiers);
    Json unresolved = Json::array();
    for (Label l = 0; l < r.size(); ++l) {
        if (!r.resolved[l]) {
            unresolved.push_back(l + 1);
        }
    }
    j["unresolved"] = std::move(unresolved);
    return j;
}

Json fit_json(const std::vector<distfit::Ranked>& ranked) {
    Json arr = Json::array();
    for (const auto& r : ranked) {
        Json e;
        e["family"] = distfit::to_string(r.family);
        if (!r.result) {
            e["error"] = r.error;
            arr.push_back(std::move(e));
            continue;
        }
        Json params;
        for (const auto& [k, v] : r.result->params) {
            params[k] = v;
        }
        e["params"] = std::move(params);
        e["loglik"] = r.result->loglik;
        e["ks"] = r.result->ks;
        e["n"] = r.result->n;
        if (r.result->tail_fraction) {
            e["tail_fraction"] = *r.result->tail_fraction;
        }
        if (r.result->family.family == distfit::Family::Weibull) {
            e["eta_constraint_active"] = r.result->constraint_active;
        }
        if (r.result->iterations > 0) {
            e["iterations"] = r.result->iterations;
        }
        arr.push_back(std::move(e));
    }
    return arr;
}

std::string cdf_csv(const distfit::Sample& s, const distfit::FitResult& r) {
    const auto& x = s.sorted();
    std::ostringstream out;
    out << "value,empirical_cdf,fitted_cdf\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i + 1 < x.size() && x[i + 1] == x[i]) {
            continue;
        }
        out << format_double(x[i]) << ',' << format_double(static_cast<double>(i + 1) / x.size()) << ','
            << format_double(r.cdf(x[i])) << '\n';
    }
    return out.str();
}

const std::vector<std::string>& Populations::cascade_metrics() {
    static const std::vector<std::string> names{"size",        "spread",            "diameter",
                                                "total_paths", "total_path_length", "avg_path_length"};
    return names;
}

void Populations::add(const std::string& story, const CascadeGraph& cg, const ProcessMetrics& m) {
    for (const auto& c : m.cascades) {
        if (!c.active) {
            continue;
        }
        auto push = [&](const std::string& metric, std::string v) {
            rows_[metric].push_back({story, c.seed, cg.node_id(c.seed), std::move(v)});
        };
        push("size", std::to_string(c.size));
        push("spread", std::to_string(c.spread));
        push("diameter", std::to_string(c.diameter));
        push("total_paths", total_text(c.paths.total_paths));
        push("total_path_length", total_text(c.paths.total_length));
        push("avg_path_length", format_double(c.paths.average_length().value_or(0.0)));
    }
    counts_.emplace_back(story, m.num_cascades);
}

std::map<std::string, std::string> Populations::render() const {
    std::map<std::string, std::string> out;
    for (const auto& metric : cascade_metrics()) {
        std::ostringstream s;
        s << "story_id,seed_label,seed_node_id,value\n";
        if (auto it = rows_.find(metric); it != rows_.end()) {
            for (const auto& r : it->second) {
                s << csv_field(r.story) << ',' << r.seed + 1 << ',' << r.node << ',' << r.value << '\n';
            }
        }
        out[metric] = s.str();
    }
    std::ostringstream s;
    s << "story_id,value\n";
    for (const auto& [story, n] : counts_) {
        s << csv_field(story) << ',' << n << '\n';
    }
    out["num_cascades"] = s.str();
    return out;
}

} // namespace cgf::reports
