#include "cgf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cgf/errors.hpp"

namespace cgf {

Attenuation::Attenuation(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("attenuation must lie in (0, 1], got " + std::to_string(alpha));
    }
}

SeedWeights::SeedWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double w : weights_) {
        if (!(w > 0.0)) {
            throw DomainError("seed weights must be positive");
        }
    }
}

namespace {

void check_weights(const SeedWeights& w, std::size_t seeds) {
    if (!w.uniform() && w.size() != seeds) {
        throw DomainError("expected " + std::to_string(seeds) + " seed weights, got " +
                          std::to_string(w.size()));
    }
}

} // namespace

const SeedEntry* ContagionTable::find(Label j, std::size_t seed) const {
    auto r = row(j);
    auto it = std::lower_bound(r.begin(), r.end(), seed,
                               [](const SeedEntry& e, std::size_t s) { return e.seed < s; });
    if (it == r.end() || it->seed != seed) {
        return nullptr;
    }
    return &*it;
}

double ContagionTable::contagion(Label j, std::size_t seed) const {
    const auto* e = find(j, seed);
    return e ? e->contagion : 0.0;
}

double ContagionTable::length(Label j, std::size_t seed) const {
    const auto* e = find(j, seed);
    return e ? e->length : 0.0;
}

void ContagionTable::reserve(std::size_t rows, std::size_t entries) { entries_.reserve(rows, entries); }

bool operator==(const ContagionTable& a, const ContagionTable& b) {
    if (a.alpha() != b.alpha() || a.seed_labels_ != b.seed_labels_ || a.rows() != b.rows() ||
        a.nonzeros() != b.nonzeros()) {
        return false;
    }
    for (std::size_t j = 0; j < a.rows(); ++j) {
        const auto x = a.row(static_cast<Label>(j));
        const auto y = b.row(static_cast<Label>(j));
        if (!std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const SeedEntry& u, const SeedEntry& v) {
                return u.seed == v.seed && u.contagion == v.contagion && u.length == v.length;
            })) {
            return false;
        }
    }
    return true;
}

void TableAccumulator::append_row(ContagionTable& table, std::span<const Label> in_edges) {
    if (in_edges.empty()) {
        const auto seed = static_cast<std::uint32_t>(table.seed_labels_.size());
        table.seed_labels_.push_back(static_cast<Label>(table.rows()));
        const SeedEntry self{seed, 1.0, 0.0};
        table.entries_.append({&self, 1});
        return;
    }
    const std::size_t k = table.seed_labels_.size();
    if (mark_.size() < k) {
        c_.resize(k);
        l_.resize(k);
        mark_.resize(k, 0);
    }
    const double alpha = table.alpha();
    touched_.clear();
    for (Label from : in_edges) {
        for (const SeedEntry& e : table.row(from)) {
            const auto p = e.seed;
            if (!mark_[p]) {
                mark_[p] = 1;
                c_[p] = 0.0;
                l_[p] = 0.0;
                touched_.push_back(p);
            }
            c_[p] += alpha * e.contagion;
            l_[p] += alpha * (e.contagion + e.length);
        }
    }
    std::sort(touched_.begin(), touched_.end());
    out_.clear();
    for (auto p : touched_) {
        out_.push_back({p, c_[p], l_[p]});
        mark_[p] = 0;
    }
    table.entries_.append(out_);
}

ContagionTable compute_tables(const CascadeGraph& cg, Attenuation a) {
    ContagionTable table(a);
    table.reserve(cg.size(), cg.size() + cg.seeds().size());
    TableAccumulator acc;
    for (std::size_t i = 0; i < cg.size(); ++i) {
        acc.append_row(table, cg.in_edges(static_cast<Label>(i)));
    }
    return table;
}

PhiSeries phi_series(ContagionTable table, const SeedWeights& w) {
    check_weights(w, table.seed_count());
    PhiSeries out{std::move(table), {}};
    out.phi.reserve(out.f.rows());
    for (std::size_t j = 0; j < out.f.rows(); ++j) {
        double phi = 0.0;
        for (const auto& e : out.f.row(static_cast<Label>(j))) {
            phi += e.contagion * w(e.seed);
        }
        out.phi.push_back(phi);
    }
    return out;
}

PhiSeries phi_series(const CascadeGraph& cg, Attenuation a, const SeedWeights& w) {
    return phi_series(compute_tables(cg, a), w);
}

std::vector<double> phi_derivative(const ContagionTable& table, const SeedWeights& w) {
    check_weights(w, table.seed_count());
    std::vector<double> out;
    out.reserve(table.rows());
    const double alpha = table.alpha();
    for (std::size_t j = 0; j < table.rows(); ++j) {
        double d = 0.0;
        for (const auto& e : table.row(static_cast<Label>(j))) {
            d += e.length / alpha * w(e.seed);
        }
        out.push_back(d);
    }
    return out;
}

std::vector<double> phi_derivative(const CascadeGraph& cg, Attenuation a, const SeedWeights& w) {
    return phi_derivative(compute_tables(cg, a), w);
}

std::vector<CascadePeak> cascade_peaks(const CascadeGraph& cg, Attenuation a) {
    const double log_alpha = std::log(a.value());
    const std::size_t k = cg.seeds().size();
    std::vector<CascadePeak> peaks(k);
    for (std::size_t p = 0; p < k; ++p) {
        peaks[p].seed = static_cast<std::uint32_t>(p);
    }
    // Row-sparse log f values, same layout as ContagionTable.
    std::vector<std::size_t> offsets{0};
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::vector<double> hi(k), sum(k);
    std::vector<std::uint8_t> mark(k, 0);
    std::vector<std::uint32_t> touched;
    std::uint32_t next_seed = 0;
    for (std::size_t i = 0; i < cg.size(); ++i) {
        auto in = cg.in_edges(static_cast<Label>(i));
        if (in.empty()) {
            entries.emplace_back(next_seed++, 0.0);
            offsets.push_back(entries.size());
            continue;
        }
        touched.clear();
        // Two sweeps per row: find the max, then accumulate exp(v - max).
        for (Label from : in) {
            for (auto e = offsets[from]; e < offsets[from + 1]; ++e) {
                auto [p, v] = entries[e];
                if (!mark[p]) {
                    mark[p] = 1;
                    hi[p] = v;
                    sum[p] = 0.0;
                    touched.push_back(p);
                } else {
                    hi[p] = std::max(hi[p], v);
                }
            }
        }
        for (Label from : in) {
            for (auto e = offsets[from]; e < offsets[from + 1]; ++e) {
                auto [p, v] = entries[e];
                sum[p] += std::exp(v - hi[p]);
            }
        }
        std::sort(touched.begin(), touched.end());
        for (auto p : touched) {
            const double v = log_alpha + hi[p] + std::log(sum[p]);
            entries.emplace_back(p, v);
            peaks[p].log_max_f = std::max(peaks[p].log_max_f, v);
            mark[p] = 0;
        }
        offsets.push_back(entries.size());
    }
    return peaks;
}

StreamingEngine::StreamingEngine(const FollowerGraph& g, Attenuation a, SeedWeights w,
                                 BuildOptions options)
    : builder_(g, options), weights_(std::move(w)), table_(a) {}

Label StreamingEngine::push(NodeId node, Timestamp time) {
    const Label label = builder_.append(node, time);
    acc_.append_row(table_, builder_.in_edges(label));
    double phi = 0.0;
    for (const auto& e : table_.row(label)) {
        phi += e.contagion * weights_(e.seed);
    }
    phi_.push_back(phi);
    return label;
}

} // namespace cgf
