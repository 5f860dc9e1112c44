#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cgf::distfit {

enum class Family { Lognormal, Weibull, WeibullMixture, PowerLaw, Dpln };

struct FamilySpec {
    Family family = Family::Lognormal;
    std::size_t components = 2;  // weibull-mixture only

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

// "lognormal", "weibull", "weibull-mixture(3)", "powerlaw", "dpln"
std::string to_string(const FamilySpec& f);
FamilySpec parse_family(const std::string& text);

// Positive observations. Integer-valued metrics set `discrete`; they are fitted
// with the continuous likelihood on the values as given.
class Sample {
public:
    explicit Sample(std::vector<double> values, bool discrete = false);
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& sorted() const { return sorted_; }
    bool discrete() const { return discrete_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
    bool discrete_;
};

struct FitConfig {
    std::size_t max_iterations = 2000;   // EM iterations or quasi-Newton steps
    double tolerance = 1e-8;             // relative log-likelihood change for EM
    double gradient_tolerance = 1e-7;    // quasi-Newton stop on the scaled objective
    std::size_t max_xmin_candidates = 2000;
    // Optional explicit start in the family's parameter order.
    std::optional<std::vector<double>> start;
};

struct FitResult {
    FamilySpec family;
    // Named in the conventional symbols, e.g. mu, sigma / k, lambda, eta /
    // alpha_1, k_1, lambda_1, ... / alpha, x_min / alpha, beta, mu, sigma.
    std::vector<std::pair<std::string, double>> params;
    double loglik = 0.0;
    double ks = 1.0;
    std::size_t n = 0;
    std::optional<double> tail_fraction;  // power law
    bool constraint_active = false;       // Weibull location pinned below the sample minimum
    std::size_t iterations = 0;
    std::vector<double> loglik_trace;     // mixture EM, one entry per iteration

    double param(const std::string& name) const;
    std::vector<double> values() const;
    double cdf(double x) const;
    double pdf(double x) const;
};

FitResult fit(const Sample& sample, const FamilySpec& family, const FitConfig& config = {});

struct Ranked {
    FamilySpec family;
    std::optional<FitResult> result;
    std::string error;  // set when the fit failed
};

// Ascending KS; failed fits last, in request order.
std::vector<Ranked> compare(const Sample& sample, const std::vector<FamilySpec>& families,
                            const FitConfig& config = {});

// Sup distance between the empirical CDF of `sorted` and `cdf`.
template <class Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf&& cdf);

// Distribution functions. Invalid parameters raise DomainError; x <= 0 (or
// below the support) gives CDF 0 and density 0.
double lognormal_cdf(double x, double mu, double sigma);
double lognormal_pdf(double x, double mu, double sigma);
double weibull_cdf(double x, double k, double lambda, double eta = 0.0);
double weibull_pdf(double x, double k, double lambda, double eta = 0.0);
double weibull_mixture_cdf(double x, const std::vector<double>& weights, const std::vector<double>& k,
                           const std::vector<double>& lambda);
double weibull_mixture_pdf(double x, const std::vector<double>& weights, const std::vector<double>& k,
                           const std::vector<double>& lambda);
double powerlaw_cdf(double x, double alpha, double x_min);
double powerlaw_pdf(double x, double alpha, double x_min);
double dpln_cdf(double x, double alpha, double beta, double mu, double sigma);
double dpln_pdf(double x, double alpha, double beta, double mu, double sigma);
double dpln_logpdf(double x, double alpha, double beta, double mu, double sigma);

template <class Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf&& cdf) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        const double f = cdf(sorted[i]);
        const double below = static_cast<double>(i) / n;
        const double upto = static_cast<double>(j) / n;
        d = std::max(d, std::max(std::abs(f - below), std::abs(upto - f)));
        i = j;
    }
    return d;
}

} // namespace cgf::distfit
