#include "cgf/path_profile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cgf/errors.hpp"

namespace cgf {

// ---- PathCount -------------------------------------------------------------

PathCount::PathCount(Wide v) : value_(std::move(v)) {
    if (std::get<Wide>(value_) < 0) {
        throw std::invalid_argument("PathCount must be non-negative");
    }
    normalize();
}

void PathCount::normalize() {
    if (auto* w = std::get_if<Wide>(&value_)) {
        if (*w <= std::numeric_limits<std::uint64_t>::max()) {
            value_ = w->convert_to<std::uint64_t>();
        }
    }
}

bool PathCount::is_zero() const {
    auto* s = std::get_if<std::uint64_t>(&value_);
    return s != nullptr && *s == 0;
}

std::optional<std::uint64_t> PathCount::to_u64() const {
    if (auto* s = std::get_if<std::uint64_t>(&value_)) {
        return *s;
    }
    return std::nullopt;
}

double PathCount::to_double() const {
    if (auto* s = std::get_if<std::uint64_t>(&value_)) {
        return static_cast<double>(*s);
    }
    return std::get<Wide>(value_).convert_to<double>();
}

std::string PathCount::to_string() const {
    if (auto* s = std::get_if<std::uint64_t>(&value_)) {
        return std::to_string(*s);
    }
    return std::get<Wide>(value_).str();
}

PathCount::Wide PathCount::to_wide() const {
    if (auto* s = std::get_if<std::uint64_t>(&value_)) {
        return Wide(*s);
    }
    return std::get<Wide>(value_);
}

PathCount& PathCount::operator+=(const PathCount& other) {
    auto* a = std::get_if<std::uint64_t>(&value_);
    auto* b = std::get_if<std::uint64_t>(&other.value_);
    if (a && b) {
        std::uint64_t r;
        if (!__builtin_add_overflow(*a, *b, &r)) {
            *a = r;
            return *this;
        }
    }
    value_ = to_wide() + other.to_wide();
    normalize();
    return *this;
}

PathCount& PathCount::operator-=(const PathCount& other) {
    if (*this < other) {
        throw std::logic_error("PathCount subtraction would go negative");
    }
    auto* a = std::get_if<std::uint64_t>(&value_);
    auto* b = std::get_if<std::uint64_t>(&other.value_);
    if (a && b) {
        *a -= *b;
        return *this;
    }
    value_ = to_wide() - other.to_wide();
    normalize();
    return *this;
}

PathCount& PathCount::operator*=(std::uint64_t factor) {
    if (auto* a = std::get_if<std::uint64_t>(&value_)) {
        std::uint64_t r;
        if (!__builtin_mul_overflow(*a, factor, &r)) {
            *a = r;
            return *this;
        }
    }
    value_ = to_wide() * factor;
    normalize();
    return *this;
}

PathCount operator/(const PathCount& a, const PathCount& b) {
    if (b.is_zero()) {
        throw std::domain_error("PathCount division by zero");
    }
    auto x = a.to_u64();
    auto y = b.to_u64();
    if (x && y) {
        return PathCount(*x / *y);
    }
    return PathCount(PathCount::Wide(a.to_wide() / b.to_wide()));
}

bool operator==(const PathCount& a, const PathCount& b) { return a.value_ == b.value_; }

std::strong_ordering operator<=>(const PathCount& a, const PathCount& b) {
    auto x = a.to_u64();
    auto y = b.to_u64();
    if (x && y) {
        return *x <=> *y;
    }
    // Normalized wide values always exceed every uint64.
    if (x) {
        return std::strong_ordering::less;
    }
    if (y) {
        return std::strong_ordering::greater;
    }
    const int c = std::get<PathCount::Wide>(a.value_).compare(std::get<PathCount::Wide>(b.value_));
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::size_t PathCount::hash() const {
    if (auto* s = std::get_if<std::uint64_t>(&value_)) {
        return std::hash<std::uint64_t>{}(*s);
    }
    return std::hash<std::string>{}(to_string());
}

// ---- Polynomial ------------------------------------------------------------

Polynomial Polynomial::unit() {
    Polynomial p;
    p.coeffs_.emplace_back(std::uint64_t{1});
    return p;
}

Polynomial Polynomial::from_coefficients(std::size_t low, std::vector<PathCount> coeffs) {
    Polynomial p;
    p.low_ = low;
    p.coeffs_ = std::move(coeffs);
    p.trim();
    return p;
}

void Polynomial::trim() {
    std::size_t lead = 0;
    while (lead < coeffs_.size() && coeffs_[lead].is_zero()) {
        ++lead;
    }
    if (lead == coeffs_.size()) {
        coeffs_.clear();
        low_ = 0;
        return;
    }
    while (coeffs_.back().is_zero()) {
        coeffs_.pop_back();
    }
    if (lead > 0) {
        coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
        low_ += lead;
    }
}

PathCount Polynomial::coefficient(std::size_t degree) const {
    if (coeffs_.empty() || degree < low_ || degree > max_degree()) {
        return {};
    }
    return coeffs_[degree - low_];
}

void Polynomial::add_shifted(const Polynomial& other) {
    if (other.empty()) {
        return;
    }
    const std::size_t olow = other.low_ + 1;
    if (coeffs_.empty()) {
        low_ = olow;
        coeffs_ = other.coeffs_;
        return;
    }
    const std::size_t new_low = std::min(low_, olow);
    const std::size_t new_high = std::max(max_degree(), olow + other.coeffs_.size() - 1);
    if (new_low < low_) {
        coeffs_.insert(coeffs_.begin(), low_ - new_low, PathCount{});
        low_ = new_low;
    }
    coeffs_.resize(new_high - low_ + 1);
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
        coeffs_[olow + i - low_] += other.coeffs_[i];
    }
}

Polynomial Polynomial::shifted_down() const {
    if (coeffs_.empty()) {
        return {};
    }
    if (low_ == 0) {
        throw std::logic_error("cannot divide a polynomial with a constant term by alpha");
    }
    Polynomial p = *this;
    --p.low_;
    return p;
}

bool Polynomial::dominates(const Polynomial& other) const {
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
        if (coefficient(other.low_ + i) < other.coeffs_[i]) {
            return false;
        }
    }
    return true;
}

void Polynomial::subtract(const Polynomial& other, const PathCount& factor) {
    if (other.empty() || factor.is_zero()) {
        return;
    }
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
        const std::size_t d = other.low_ + i;
        if (coeffs_.empty() || d < low_ || d > max_degree()) {
            if (!other.coeffs_[i].is_zero()) {
                throw std::logic_error("polynomial subtraction would go negative");
            }
            continue;
        }
        PathCount scaled = other.coeffs_[i];
        if (auto f = factor.to_u64()) {
            scaled *= *f;
        } else {
            scaled = PathCount(PathCount::Wide(scaled.to_wide() * factor.to_wide()));
        }
        coeffs_[d - low_] -= scaled;
    }
    trim();
}

PathCount Polynomial::max_multiple(const Polynomial& other) const {
    std::optional<PathCount> best;
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
        if (other.coeffs_[i].is_zero()) {
            continue;
        }
        PathCount q = coefficient(other.low_ + i) / other.coeffs_[i];
        if (!best || q < *best) {
            best = q;
        }
        if (best->is_zero()) {
            break;
        }
    }
    return best.value_or(PathCount{});
}

PathCount Polynomial::total() const {
    PathCount t;
    for (const auto& c : coeffs_) {
        t += c;
    }
    return t;
}

PathCount Polynomial::weighted_total() const {
    PathCount t;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        t += coeffs_[i] * static_cast<std::uint64_t>(low_ + i);
    }
    return t;
}

double Polynomial::evaluate(double alpha) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * alpha + it->to_double();
    }
    return acc * std::pow(alpha, static_cast<double>(low_));
}

double Polynomial::derivative(double alpha) const {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        const double d = static_cast<double>(low_ + i);
        acc += d * coeffs_[i].to_double() * std::pow(alpha, d - 1.0);
    }
    return acc;
}

bool Polynomial::any_wide() const {
    return std::any_of(coeffs_.begin(), coeffs_.end(), [](const PathCount& c) { return c.is_wide(); });
}

std::string Polynomial::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero()) {
            continue;
        }
        if (!s.empty()) {
            s += ' ';
        }
        s += std::to_string(low_ + i) + ':' + coeffs_[i].to_string();
    }
    return s;
}

std::size_t Polynomial::hash() const {
    std::size_t h = std::hash<std::size_t>{}(low_);
    for (const auto& c : coeffs_) {
        h ^= c.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---- PathProfile -----------------------------------------------------------

PathProfile PathProfile::from_rows(std::vector<std::vector<ProfileEntry>> rows, std::size_t seeds) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& r = rows[j];
        for (std::size_t e = 0; e < r.size(); ++e) {
            if (r[e].seed >= seeds || r[e].poly.empty() || (e > 0 && r[e - 1].seed >= r[e].seed)) {
                throw InputError("path profile row " + std::to_string(j + 1) + " is malformed");
            }
        }
    }
    PathProfile p;
    p.rows_ = std::move(rows);
    p.seeds_ = seeds;
    return p;
}

const Polynomial* PathProfile::find(Label j, std::size_t seed) const {
    const auto& r = rows_[j];
    auto it = std::lower_bound(r.begin(), r.end(), seed,
                               [](const ProfileEntry& e, std::size_t s) { return e.seed < s; });
    if (it == r.end() || it->seed != seed) {
        return nullptr;
    }
    return &it->poly;
}

std::size_t PathProfile::nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) {
        n += r.size();
    }
    return n;
}

bool PathProfile::any_wide() const {
    for (const auto& r : rows_) {
        for (const auto& e : r) {
            if (e.poly.any_wide()) {
                return true;
            }
        }
    }
    return false;
}

double PathProfile::evaluate(Label j, std::size_t seed, double alpha) const {
    const auto* p = find(j, seed);
    return p ? p->evaluate(alpha) : 0.0;
}

PathProfile compute_path_profiles(const CascadeGraph& cg, ExactOptions options) {
    PathProfile out;
    out.rows_.resize(cg.size());
    const std::size_t k = cg.seeds().size();
    out.seeds_ = k;
    std::vector<Polynomial> acc(k);
    std::vector<std::uint8_t> mark(k, 0);
    std::vector<std::uint32_t> touched;
    std::uint32_t next_seed = 0;
    for (std::size_t i = 0; i < cg.size(); ++i) {
        auto& row = out.rows_[i];
        auto in = cg.in_edges(static_cast<Label>(i));
        if (in.empty()) {
            row.push_back({next_seed++, Polynomial::unit()});
            continue;
        }
        touched.clear();
        for (Label from : in) {
            for (const auto& e : out.rows_[from]) {
                if (!mark[e.seed]) {
                    mark[e.seed] = 1;
                    acc[e.seed] = Polynomial{};
                    touched.push_back(e.seed);
                }
                acc[e.seed].add_shifted(e.poly);
            }
        }
        std::sort(touched.begin(), touched.end());
        row.reserve(touched.size());
        for (auto p : touched) {
            mark[p] = 0;
            if (!options.allow_arbitrary_precision && acc[p].any_wide()) {
                throw OverflowError("path count from seed " + std::to_string(p + 1) + " to label " +
                                    std::to_string(i + 1) + " exceeds 64 bits");
            }
            row.push_back({p, std::move(acc[p])});
        }
    }
    return out;
}

} // namespace cgf
