#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cgf/cascade_graph.hpp"

namespace cgf {

// Non-negative path count. Stays in a uint64 until an operation overflows,
// then switches to an arbitrary-precision integer.
class PathCount {
public:
    using Wide = boost::multiprecision::cpp_int;

    PathCount() = default;
    PathCount(std::uint64_t v) : value_(v) {}  // NOLINT: implicit by design of count literals
    explicit PathCount(Wide v);

    bool is_wide() const { return std::holds_alternative<Wide>(value_); }
    bool is_zero() const;
    std::optional<std::uint64_t> to_u64() const;
    double to_double() const;
    std::string to_string() const;
    Wide to_wide() const;

    PathCount& operator+=(const PathCount& other);
    // Requires *this >= other.
    PathCount& operator-=(const PathCount& other);
    PathCount& operator*=(std::uint64_t factor);

    friend PathCount operator+(PathCount a, const PathCount& b) { return a += b; }
    friend PathCount operator-(PathCount a, const PathCount& b) { return a -= b; }
    friend PathCount operator*(PathCount a, std::uint64_t f) { return a *= f; }
    // Floor division, b > 0.
    friend PathCount operator/(const PathCount& a, const PathCount& b);

    friend bool operator==(const PathCount& a, const PathCount& b);
    friend std::strong_ordering operator<=>(const PathCount& a, const PathCount& b);

    std::size_t hash() const;

private:
    void normalize();
    std::variant<std::uint64_t, Wide> value_{std::uint64_t{0}};
};

// Path-length generating polynomial: coefficient l counts paths of length l.
// Stored as a dense coefficient run starting at the lowest nonzero degree.
class Polynomial {
public:
    static Polynomial unit();  // the empty path: 1 * alpha^0

    bool empty() const { return coeffs_.empty(); }
    std::size_t min_degree() const { return low_; }
    std::size_t max_degree() const { return low_ + coeffs_.size() - 1; }
    PathCount coefficient(std::size_t degree) const;
    std::span<const PathCount> coefficients() const { return coeffs_; }

    // this += alpha * other
    void add_shifted(const Polynomial& other);
    // this = this / alpha; requires a zero constant term.
    Polynomial shifted_down() const;
    // this -= factor * other, requires coefficient-wise dominance.
    void subtract(const Polynomial& other, const PathCount& factor);
    // Largest m with m * other <= this coefficient-wise (other nonempty).
    PathCount max_multiple(const Polynomial& other) const;
    bool dominates(const Polynomial& other) const;

    PathCount total() const;           // value at alpha = 1
    PathCount weighted_total() const;  // sum of l * c_l: derivative at alpha = 1
    double evaluate(double alpha) const;
    double derivative(double alpha) const;

    bool any_wide() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.low_ == b.low_ && a.coeffs_ == b.coeffs_;
    }

    std::string to_string() const;  // e.g. "1:1 2:1"
    std::size_t hash() const;

    static Polynomial from_coefficients(std::size_t low, std::vector<PathCount> coeffs);

private:
    void trim();
    std::size_t low_ = 0;
    std::vector<PathCount> coeffs_;
};

struct ProfileEntry {
    std::uint32_t seed = 0;
    Polynomial poly;
    friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

struct ExactOptions {
    // When false, a count exceeding 64 bits raises OverflowError.
    bool allow_arbitrary_precision = true;
};

class PathProfile;
PathProfile compute_path_profiles(const CascadeGraph& cg, ExactOptions options = {});

// Exact per (node, seed) path histograms; the polynomial form of f(j, i_p, alpha).
class PathProfile {
public:
    PathProfile() = default;
    // Rows must be sorted by seed with nonempty polynomials.
    static PathProfile from_rows(std::vector<std::vector<ProfileEntry>> rows, std::size_t seeds);

    std::size_t rows() const { return rows_.size(); }
    std::size_t seed_count() const { return seeds_; }
    std::span<const ProfileEntry> row(Label j) const { return rows_[j]; }
    const Polynomial* find(Label j, std::size_t seed) const;
    std::size_t nonzeros() const;
    bool any_wide() const;

    double evaluate(Label j, std::size_t seed, double alpha) const;

private:
    friend PathProfile compute_path_profiles(const CascadeGraph&, ExactOptions);
    std::vector<std::vector<ProfileEntry>> rows_;
    std::size_t seeds_ = 0;
};

} // namespace cgf
