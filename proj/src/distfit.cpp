#include "cgf/distfit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <regex>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "cgf/errors.hpp"

namespace cgf::distfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_norm_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// log of the Mills ratio (1 - Phi(w)) / phi(w)
double log_mills(double w) {
    if (w < 35.0) {
        return std::log(0.5 * std::erfc(w / std::numbers::sqrt2)) + 0.5 * w * w + kLogSqrt2Pi;
    }
    const double r = 1.0 / (w * w);
    return -std::log(w) + std::log1p(r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0))));
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw DomainError(what);
    }
}

void check_dpln(double alpha, double beta, double sigma) {
    require(alpha > 0 && beta > 0 && sigma > 0 && std::isfinite(alpha) && std::isfinite(beta) &&
                std::isfinite(sigma),
            "dpln parameters need alpha > 0, beta > 0, sigma > 0");
}

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) {
        return m;
    }
    double s = 0.0;
    for (double x : v) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

// ---- Weibull building blocks ----------------------------------------------

struct Weibull2 {
    double k;
    double lambda;
};

double weibull_logpdf(double y, double k, double lambda) {
    const double t = y / lambda;
    return std::log(k / lambda) + (k - 1.0) * std::log(t) - std::pow(t, k);
}

// Weighted two-parameter MLE on y > 0 (weights may be null for unit weights).
Weibull2 weibull_mle(const std::vector<double>& y, const std::vector<double>* w, double k_guess) {
    const double ymax = *std::max_element(y.begin(), y.end());
    std::vector<double> ly(y.size());
    double wsum = 0.0, wlog = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ly[i] = std::log(y[i] / ymax);
        const double wi = w ? (*w)[i] : 1.0;
        wsum += wi;
        wlog += wi * ly[i];
    }
    const double mean_log = wlog / wsum;
    // g(k) = 1/k + mean log y - E_k[log y], decreasing in k
    auto g = [&](double k) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double wi = w ? (*w)[i] : 1.0;
            const double p = wi * std::exp(k * ly[i]);
            s0 += p;
            s1 += p * ly[i];
            s2 += p * ly[i] * ly[i];
        }
        const double m1 = s1 / s0;
        const double var = s2 / s0 - m1 * m1;
        return std::make_pair(1.0 / k + mean_log - m1, -1.0 / (k * k) - std::max(var, 0.0));
    };
    double lo = 1e-3, hi = std::max(2.0, k_guess * 2.0);
    while (g(hi).first > 0.0) {
        hi *= 2.0;
        if (hi > 1e6) {
            throw DegenerateSampleError("weibull shape diverges: sample has no spread");
        }
    }
    while (g(lo).first < 0.0 && lo > 1e-12) {
        lo *= 0.1;
    }
    std::uintmax_t iters = 200;
    const double guess = std::clamp(k_guess, lo, hi);
    const double k = boost::math::tools::newton_raphson_iterate(g, guess, lo, hi, 50, iters);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += (w ? (*w)[i] : 1.0) * std::exp(k * ly[i]);
    }
    return {k, ymax * std::pow(s / wsum, 1.0 / k)};
}

double weibull_loglik(const std::vector<double>& y, const Weibull2& p) {
    double ll = 0.0;
    for (double v : y) {
        ll += weibull_logpdf(v, p.k, p.lambda);
    }
    return ll;
}

// ---- family fits --------------------------------------------------------

FitResult fit_lognormal(const Sample& s) {
    const auto& x = s.values();
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) {
        m += std::log(v);
    }
    m /= n;
    double var = 0.0, sum_log = 0.0;
    for (double v : x) {
        const double d = std::log(v) - m;
        var += d * d;
        sum_log += std::log(v);
    }
    var /= n;
    const double sigma = std::sqrt(var);
    FitResult r;
    r.params = {{"mu", m}, {"sigma", sigma}};
    r.loglik = -sum_log - n * std::log(sigma) - n * kLogSqrt2Pi - 0.5 * n;
    return r;
}

FitResult fit_weibull(const Sample& s) {
    const auto& sorted = s.sorted();
    const double lo = sorted.front(), range = sorted.back() - sorted.front();
    const double eps = 1e-6 * range;
    const double eta_max = lo - eps;
    std::vector<double> y(sorted.size());
    double k_prev = 1.0;
    auto profile = [&](double eta) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = sorted[i] - eta;
        }
        const auto p = weibull_mle(y, nullptr, k_prev);
        k_prev = p.k;
        return std::make_pair(weibull_loglik(y, p), p);
    };
    // eta = eta_max - u, u log-spaced from eps to lo + range
    const double u_min = eps, u_max = lo + range;
    const int grid = 60;
    std::vector<double> t(grid), ll(grid);
    for (int i = 0; i < grid; ++i) {
        t[i] = std::log(u_min) + (std::log(u_max) - std::log(u_min)) * i / (grid - 1);
        ll[i] = profile(eta_max - std::exp(t[i])).first;
    }
    const int best = static_cast<int>(std::max_element(ll.begin(), ll.end()) - ll.begin());
    const double a = t[std::max(best - 1, 0)], b = t[std::min(best + 1, grid - 1)];
    auto [tb, neg] = boost::math::tools::brent_find_minima(
        [&](double tt) { return -profile(eta_max - std::exp(tt)).first; }, a, b, 40);
    double eta = eta_max - std::exp(tb);
    bool active = false;
    if (-neg < ll[0] || (best == 0 && tb <= t[0] + 1e-6)) {
        eta = eta_max;
        active = true;
    }
    const auto [final_ll, p] = profile(eta);
    FitResult r;
    r.params = {{"k", p.k}, {"lambda", p.lambda}, {"eta", eta}};
    r.loglik = final_ll;
    r.constraint_active = active;
    return r;
}

FitResult fit_mixture(const Sample& s, std::size_t comps, const FitConfig& cfg) {
    require(comps >= 2, "weibull mixture needs at least two components");
    const auto& x = s.sorted();
    const std::size_t n = x.size();
    if (n < 2 * comps) {
        throw DegenerateSampleError("too few observations for the mixture");
    }
    std::vector<double> w(comps), k(comps), lam(comps);
    if (cfg.start) {
        require(cfg.start->size() == 3 * comps, "mixture start needs alpha, k, lambda per component");
        for (std::size_t c = 0; c < comps; ++c) {
            w[c] = (*cfg.start)[3 * c];
            k[c] = (*cfg.start)[3 * c + 1];
            lam[c] = (*cfg.start)[3 * c + 2];
        }
    } else {
        for (std::size_t c = 0; c < comps; ++c) {
            std::vector<double> chunk(x.begin() + static_cast<long>(c * n / comps),
                                      x.begin() + static_cast<long>((c + 1) * n / comps));
            w[c] = 1.0 / static_cast<double>(comps);
            if (chunk.front() == chunk.back()) {
                k[c] = 1.0;
                lam[c] = chunk.front();
            } else {
                const auto p = weibull_mle(chunk, nullptr, 1.0);
                k[c] = p.k;
                lam[c] = p.lambda;
            }
        }
    }

    std::vector<std::vector<double>> resp(comps, std::vector<double>(n));
    std::vector<double> terms(comps);
    auto e_step = [&] {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < comps; ++c) {
                terms[c] = std::log(w[c]) + weibull_logpdf(x[i], k[c], lam[c]);
            }
            const double z = log_sum_exp(terms);
            ll += z;
            for (std::size_t c = 0; c < comps; ++c) {
                resp[c][i] = std::exp(terms[c] - z);
            }
        }
        return ll;
    };

    FitResult r;
    double ll = e_step();
    r.loglik_trace.push_back(ll);
    bool converged = false;
    std::size_t it = 0;
    while (it < cfg.max_iterations) {
        ++it;
        const auto w0 = w, k0 = k, l0 = lam;
        for (std::size_t c = 0; c < comps; ++c) {
            const double rc = std::accumulate(resp[c].begin(), resp[c].end(), 0.0);
            w[c] = rc / static_cast<double>(n);
            if (rc <= 0.0) {
                continue;
            }
            const auto p = weibull_mle(x, &resp[c], k[c]);
            k[c] = p.k;
            lam[c] = p.lambda;
        }
        const double next = e_step();
        if (next < ll) {
            // rounding can undo an exact M-step; keep the better iterate
            w = w0;
            k = k0;
            lam = l0;
            e_step();
            converged = true;
            break;
        }
        const double change = std::abs(next - ll);
        ll = next;
        r.loglik_trace.push_back(ll);
        if (change <= cfg.tolerance * std::abs(ll)) {
            converged = true;
            break;
        }
    }
    std::vector<std::size_t> order(comps);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lam[a] < lam[b]; });
    std::vector<double> flat;
    for (std::size_t c : order) {
        const std::string i = std::to_string(r.params.size() / 3 + 1);
        r.params.push_back({"alpha_" + i, w[c]});
        r.params.push_back({"k_" + i, k[c]});
        r.params.push_back({"lambda_" + i, lam[c]});
        flat.insert(flat.end(), {w[c], k[c], lam[c]});
    }
    if (!converged) {
        throw ConvergenceError("weibull mixture EM did not converge in " + std::to_string(cfg.max_iterations) +
                                   " iterations",
                               flat);
    }
    r.loglik = ll;
    r.iterations = it;
    return r;
}

FitResult fit_powerlaw(const Sample& s, const FitConfig& cfg) {
    const auto& x = s.sorted();
    const std::size_t n = x.size();
    std::vector<double> uniq;
    std::unique_copy(x.begin(), x.end(), std::back_inserter(uniq));
    uniq.pop_back();  // a tail needs at least two distinct values
    if (uniq.empty()) {
        throw DegenerateSampleError("power law needs at least two distinct values");
    }
    std::vector<double> cand;
    if (uniq.size() <= cfg.max_xmin_candidates) {
        cand = uniq;
    } else {
        const std::size_t m = cfg.max_xmin_candidates;
        for (std::size_t i = 0; i < m; ++i) {
            cand.push_back(uniq[i * (uniq.size() - 1) / (m - 1)]);
        }
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    }
    // suffix sums of log x
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] + std::log(x[i]);
    }
    double best_ks = kInf, best_alpha = 0.0, best_xmin = 0.0;
    std::size_t best_start = 0;
    std::vector<double> tail;
    for (double xm : cand) {
        const std::size_t start = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), xm) - x.begin());
        const double nt = static_cast<double>(n - start);
        const double denom = suffix[start] - nt * std::log(xm);
        if (denom <= 0.0) {
            continue;
        }
        const double alpha = 1.0 + nt / denom;
        tail.assign(x.begin() + static_cast<long>(start), x.end());
        const double d = ks_statistic(tail, [&](double v) { return 1.0 - std::pow(v / xm, 1.0 - alpha); });
        if (d < best_ks) {
            best_ks = d;
            best_alpha = alpha;
            best_xmin = xm;
            best_start = start;
        }
    }
    const double nt = static_cast<double>(n - best_start);
    FitResult r;
    r.params = {{"alpha", best_alpha}, {"x_min", best_xmin}};
    r.loglik = nt * std::log(best_alpha - 1.0) - nt * std::log(best_xmin) -
               best_alpha * (suffix[best_start] - nt * std::log(best_xmin));
    r.ks = best_ks;
    r.tail_fraction = nt / static_cast<double>(n);
    return r;
}

// ---- DPLN ---------------------------------------------------------------

struct DplnObjective {
    const std::vector<double>* logs;  // log x
    double n;
};

struct DplnPoint {
    double a, b, mu, sg;
};

std::optional<DplnPoint> unpack(const gsl_vector* theta) {
    DplnPoint p{std::exp(gsl_vector_get(theta, 0)), std::exp(gsl_vector_get(theta, 1)), gsl_vector_get(theta, 2),
                std::exp(gsl_vector_get(theta, 3))};
    const bool ok = std::isfinite(p.a) && std::isfinite(p.b) && std::isfinite(p.sg) && std::isfinite(p.mu) &&
                    p.a > 1e-12 && p.b > 1e-12 && p.sg > 1e-12;
    return ok ? std::optional(p) : std::nullopt;
}

// Mean negative loglik over theta = (log alpha, log beta, mu, log sigma) and
// its gradient in theta. Uses M'(w) = w M(w) - 1 for the Mills ratio.
double dpln_eval(const gsl_vector* theta, const DplnObjective& o, gsl_vector* grad) {
    const auto p = unpack(theta);
    if (!p) {
        if (grad) {
            gsl_vector_set_zero(grad);
        }
        return 1e10;
    }
    const auto [a, b, mu, sg] = *p;
    const double c = std::log(a * b / (a + b));
    double sum = 0.0, ga = 0.0, gb = 0.0, gm = 0.0, gs = 0.0;
    for (double lx : *o.logs) {
        const double z = (lx - mu) / sg;
        const double w1 = a * sg - z, w2 = b * sg + z;
        const double t1 = log_mills(w1), t2 = log_mills(w2);
        const double m = std::max(t1, t2);
        const double lse = m + std::log(std::exp(t1 - m) + std::exp(t2 - m));
        sum += c - lx + log_norm_pdf(z) + lse;
        if (grad) {
            const double inv = std::exp(-lse);
            const double d1 = w1 * std::exp(t1 - lse) - inv;  // M1' / (M1 + M2)
            const double d2 = w2 * std::exp(t2 - lse) - inv;
            ga += sg * d1;
            gb += sg * d2;
            gm += (z + d1 - d2) / sg;
            gs += z * z / sg + d1 * (a + z / sg) + d2 * (b - z / sg);
        }
    }
    const double v = -sum / o.n;
    if (grad) {
        const double n = o.n;
        gsl_vector_set(grad, 0, -a * (n * (1.0 / a - 1.0 / (a + b)) + ga) / n);
        gsl_vector_set(grad, 1, -b * (n * (1.0 / b - 1.0 / (a + b)) + gb) / n);
        gsl_vector_set(grad, 2, -gm / n);
        gsl_vector_set(grad, 3, -sg * gs / n);
    }
    return std::isfinite(v) ? v : 1e10;
}

double dpln_objective(const gsl_vector* theta, void* params) {
    return dpln_eval(theta, *static_cast<const DplnObjective*>(params), nullptr);
}

void dpln_gradient(const gsl_vector* theta, void* params, gsl_vector* g) {
    dpln_eval(theta, *static_cast<const DplnObjective*>(params), g);
}

void dpln_fdf(const gsl_vector* theta, void* params, double* f, gsl_vector* g) {
    *f = dpln_eval(theta, *static_cast<const DplnObjective*>(params), g);
}

// Cumulants of log X: mean mu + 1/a - 1/b, variance sigma^2 + 1/a^2 + 1/b^2,
// third 2/a^3 - 2/b^3, fourth 6/a^4 + 6/b^4.
std::vector<double> dpln_moment_start(const std::vector<double>& lx) {
    const double n = static_cast<double>(lx.size());
    const double m = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : lx) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double k4 = m4 - 3 * m2 * m2;
    const double sd = std::sqrt(m2);
    double ia = 0.5 * sd, ib = 0.5 * sd, s2 = 0.5 * m2;
    if (k4 > 0) {
        const double q = k4 / 6.0;          // ia^4 + ib^4
        const double target = m3 / 2.0;     // ia^3 - ib^3
        const double top = std::pow(q, 0.25);
        auto h = [&](double u) { return u * u * u - std::pow(std::max(q - u * u * u * u, 0.0), 0.75); };
        if (h(0) <= target && target <= h(top)) {
            double lo = 0, hi = top;
            for (int i = 0; i < 100; ++i) {
                const double mid = 0.5 * (lo + hi);
                (h(mid) < target ? lo : hi) = mid;
            }
            const double u = 0.5 * (lo + hi);
            const double v = std::pow(std::max(q - u * u * u * u, 0.0), 0.25);
            const double rest = m2 - u * u - v * v;
            if (u > 1e-3 * sd && v > 1e-3 * sd && rest > 1e-4 * m2) {
                ia = u;
                ib = v;
                s2 = rest;
            }
        }
    }
    return {1.0 / ia, 1.0 / ib, m - ia + ib, std::sqrt(s2)};
}

struct DplnRun {
    std::vector<double> params;
    double objective;
    std::size_t iterations;
    bool converged;
};

DplnRun run_dpln(const std::vector<double>& lx, const std::vector<double>& start, const FitConfig& cfg) {
    DplnObjective obj{&lx, static_cast<double>(lx.size())};
    gsl_multimin_function_fdf fn{&dpln_objective, &dpln_gradient, &dpln_fdf, 4, &obj};
    gsl_vector* x0 = gsl_vector_alloc(4);
    gsl_vector_set(x0, 0, std::log(start[0]));
    gsl_vector_set(x0, 1, std::log(start[1]));
    gsl_vector_set(x0, 2, start[2]);
    gsl_vector_set(x0, 3, std::log(start[3]));
    gsl_multimin_fdfminimizer* m = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 4);
    gsl_multimin_fdfminimizer_set(m, &fn, x0, 0.1, 0.1);
    DplnRun run{{}, 0.0, 0, false};
    for (; run.iterations < cfg.max_iterations; ++run.iterations) {
        const int status = gsl_multimin_fdfminimizer_iterate(m);
        const double gnorm = gsl_blas_dnrm2(gsl_multimin_fdfminimizer_gradient(m));
        if (gsl_multimin_test_gradient(m->gradient, cfg.gradient_tolerance) == GSL_SUCCESS) {
            run.converged = true;
            break;
        }
        if (status != GSL_SUCCESS) {
            // no further progress along the line: accept a near-stationary point
            run.converged = gnorm < 1e-4;
            break;
        }
    }
    const gsl_vector* xb = gsl_multimin_fdfminimizer_x(m);
    run.params = {std::exp(gsl_vector_get(xb, 0)), std::exp(gsl_vector_get(xb, 1)), gsl_vector_get(xb, 2),
                  std::exp(gsl_vector_get(xb, 3))};
    run.objective = gsl_multimin_fdfminimizer_minimum(m);
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(x0);
    return run;
}

FitResult fit_dpln(const Sample& s, const FitConfig& cfg) {
    gsl_set_error_handler_off();
    std::vector<double> lx;
    lx.reserve(s.size());
    for (double v : s.values()) {
        lx.push_back(std::log(v));
    }
    std::vector<std::vector<double>> starts;
    if (cfg.start) {
        require(cfg.start->size() == 4, "dpln start needs alpha, beta, mu, sigma");
        check_dpln((*cfg.start)[0], (*cfg.start)[1], (*cfg.start)[3]);
        starts.push_back(*cfg.start);
    } else {
        starts.push_back(dpln_moment_start(lx));
        // a near-lognormal start guards against poor cumulant estimates
        const auto ln = fit_lognormal(s);
        starts.push_back({4.0 / ln.params[1].second, 4.0 / ln.params[1].second, ln.params[0].second,
                          0.8 * ln.params[1].second});
    }
    std::optional<DplnRun> best;
    std::vector<double> last;
    for (const auto& st : starts) {
        auto run = run_dpln(lx, st, cfg);
        last = run.params;
        if (run.converged && (!best || run.objective < best->objective)) {
            best = std::move(run);
        }
    }
    if (!best) {
        throw ConvergenceError("dpln quasi-Newton did not converge", last);
    }
    FitResult r;
    const auto& p = best->params;
    r.params = {{"alpha", p[0]}, {"beta", p[1]}, {"mu", p[2]}, {"sigma", p[3]}};
    r.loglik = -best->objective * static_cast<double>(lx.size());
    r.iterations = best->iterations;
    return r;
}

} // namespace

// ---- distribution functions ------------------------------------------------

double lognormal_cdf(double x, double mu, double sigma) {
    require(sigma > 0, "lognormal sigma must be positive");
    return x <= 0 ? 0.0 : norm_cdf((std::log(x) - mu) / sigma);
}

double lognormal_pdf(double x, double mu, double sigma) {
    require(sigma > 0, "lognormal sigma must be positive");
    if (x <= 0) {
        return 0.0;
    }
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(log_norm_pdf(z)) / (x * sigma);
}

double weibull_cdf(double x, double k, double lambda, double eta) {
    require(k > 0 && lambda > 0, "weibull needs k > 0 and lambda > 0");
    return x <= eta ? 0.0 : -std::expm1(-std::pow((x - eta) / lambda, k));
}

double weibull_pdf(double x, double k, double lambda, double eta) {
    require(k > 0 && lambda > 0, "weibull needs k > 0 and lambda > 0");
    return x <= eta ? 0.0 : std::exp(weibull_logpdf(x - eta, k, lambda));
}

namespace {
void check_mixture(const std::vector<double>& w, const std::vector<double>& k, const std::vector<double>& l) {
    require(!w.empty() && w.size() == k.size() && w.size() == l.size(), "mixture parameter lists differ in length");
    double s = 0.0;
    for (double v : w) {
        require(v >= 0, "mixture weights must be nonnegative");
        s += v;
    }
    require(std::abs(s - 1.0) < 1e-9, "mixture weights must sum to 1");
}
} // namespace

double weibull_mixture_cdf(double x, const std::vector<double>& w, const std::vector<double>& k,
                           const std::vector<double>& lambda) {
    check_mixture(w, k, lambda);
    double f = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
        f += w[c] * weibull_cdf(x, k[c], lambda[c]);
    }
    return std::min(f, 1.0);
}

double weibull_mixture_pdf(double x, const std::vector<double>& w, const std::vector<double>& k,
                           const std::vector<double>& lambda) {
    check_mixture(w, k, lambda);
    double f = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
        f += w[c] * weibull_pdf(x, k[c], lambda[c]);
    }
    return f;
}

double powerlaw_cdf(double x, double alpha, double x_min) {
    require(alpha > 1 && x_min > 0, "power law needs alpha > 1 and x_min > 0");
    return x < x_min ? 0.0 : -std::expm1((1.0 - alpha) * std::log(x / x_min));
}

double powerlaw_pdf(double x, double alpha, double x_min) {
    require(alpha > 1 && x_min > 0, "power law needs alpha > 1 and x_min > 0");
    return x < x_min ? 0.0 : (alpha - 1.0) / x_min * std::pow(x / x_min, -alpha);
}

double dpln_cdf(double x, double alpha, double beta, double mu, double sigma) {
    check_dpln(alpha, beta, sigma);
    if (x <= 0) {
        return 0.0;
    }
    const double z = (std::log(x) - mu) / sigma;
    const double lp = log_norm_pdf(z);
    const double left = beta * std::exp(lp + log_mills(alpha * sigma - z));
    const double right = alpha * std::exp(lp + log_mills(beta * sigma + z));
    const double f = norm_cdf(z) - (left - right) / (alpha + beta);
    return std::clamp(f, 0.0, 1.0);
}

double dpln_logpdf(double x, double alpha, double beta, double mu, double sigma) {
    check_dpln(alpha, beta, sigma);
    if (x <= 0) {
        return -kInf;
    }
    const double lx = std::log(x);
    const double z = (lx - mu) / sigma;
    const double t1 = log_mills(alpha * sigma - z), t2 = log_mills(beta * sigma + z);
    const double m = std::max(t1, t2);
    return std::log(alpha * beta / (alpha + beta)) - lx + log_norm_pdf(z) + m +
           std::log(std::exp(t1 - m) + std::exp(t2 - m));
}

double dpln_pdf(double x, double alpha, double beta, double mu, double sigma) {
    return x <= 0 ? (check_dpln(alpha, beta, sigma), 0.0) : std::exp(dpln_logpdf(x, alpha, beta, mu, sigma));
}

// ---- public API ------------------------------------------------------------

std::string to_string(const FamilySpec& f) {
    switch (f.family) {
    case Family::Lognormal: return "lognormal";
    case Family::Weibull: return "weibull";
    case Family::WeibullMixture: return "weibull-mixture(" + std::to_string(f.components) + ")";
    case Family::PowerLaw: return "powerlaw";
    case Family::Dpln: return "dpln";
    }
    return "?";
}

FamilySpec parse_family(const std::string& text) {
    if (text == "lognormal") return {Family::Lognormal};
    if (text == "weibull") return {Family::Weibull};
    if (text == "powerlaw" || text == "powerlaw-tail") return {Family::PowerLaw};
    if (text == "dpln") return {Family::Dpln};
    if (text == "weibull-mixture") return {Family::WeibullMixture, 2};
    static const std::regex mix(R"(weibull-mixture\((\d+)\))");
    std::smatch m;
    if (std::regex_match(text, m, mix)) {
        const auto c = std::stoul(m[1]);
        if (c < 2) {
            throw InputError("weibull-mixture needs at least 2 components");
        }
        return {Family::WeibullMixture, c};
    }
    throw InputError("unknown distribution family '" + text + "'");
}

Sample::Sample(std::vector<double> values, bool discrete) : values_(std::move(values)), discrete_(discrete) {
    if (values_.empty()) {
        throw InputError("sample is empty");
    }
    for (double v : values_) {
        if (!(v > 0) || !std::isfinite(v)) {
            throw InputError("sample values must be positive and finite");
        }
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
}

double FitResult::param(const std::string& name) const {
    for (const auto& [k, v] : params) {
        if (k == name) {
            return v;
        }
    }
    throw std::out_of_range("no parameter " + name);
}

std::vector<double> FitResult::values() const {
    std::vector<double> v;
    for (const auto& p : params) {
        v.push_back(p.second);
    }
    return v;
}

namespace {
void split_mixture(const std::vector<double>& v, std::vector<double>& w, std::vector<double>& k,
                   std::vector<double>& l) {
    for (std::size_t i = 0; i + 2 < v.size(); i += 3) {
        w.push_back(v[i]);
        k.push_back(v[i + 1]);
        l.push_back(v[i + 2]);
    }
}
} // namespace

double FitResult::cdf(double x) const {
    const auto v = values();
    switch (family.family) {
    case Family::Lognormal: return lognormal_cdf(x, v[0], v[1]);
    case Family::Weibull: return weibull_cdf(x, v[0], v[1], v[2]);
    case Family::WeibullMixture: {
        std::vector<double> w, k, l;
        split_mixture(v, w, k, l);
        return weibull_mixture_cdf(x, w, k, l);
    }
    case Family::PowerLaw: return powerlaw_cdf(x, v[0], v[1]);
    case Family::Dpln: return dpln_cdf(x, v[0], v[1], v[2], v[3]);
    }
    return 0.0;
}

double FitResult::pdf(double x) const {
    const auto v = values();
    switch (family.family) {
    case Family::Lognormal: return lognormal_pdf(x, v[0], v[1]);
    case Family::Weibull: return weibull_pdf(x, v[0], v[1], v[2]);
    case Family::WeibullMixture: {
        std::vector<double> w, k, l;
        split_mixture(v, w, k, l);
        return weibull_mixture_pdf(x, w, k, l);
    }
    case Family::PowerLaw: return powerlaw_pdf(x, v[0], v[1]);
    case Family::Dpln: return dpln_pdf(x, v[0], v[1], v[2], v[3]);
    }
    return 0.0;
}

FitResult fit(const Sample& sample, const FamilySpec& family, const FitConfig& config) {
    if (sample.sorted().front() == sample.sorted().back()) {
        throw DegenerateSampleError("all sample values are equal");
    }
    FitResult r;
    switch (family.family) {
    case Family::Lognormal: r = fit_lognormal(sample); break;
    case Family::Weibull: r = fit_weibull(sample); break;
    case Family::WeibullMixture: r = fit_mixture(sample, family.components, config); break;
    case Family::PowerLaw: r = fit_powerlaw(sample, config); break;
    case Family::Dpln: r = fit_dpln(sample, config); break;
    }
    r.family = family;
    r.n = sample.size();
    if (family.family != Family::PowerLaw) {
        r.ks = ks_statistic(sample.sorted(), [&](double x) { return r.cdf(x); });
    }
    return r;
}

std::vector<Ranked> compare(const Sample& sample, const std::vector<FamilySpec>& families, const FitConfig& config) {
    if (families.empty()) {
        throw DomainError("compare needs at least one family");
    }
    std::vector<Ranked> out;
    for (const auto& f : families) {
        Ranked r{f, std::nullopt, {}};
        try {
            r.result = fit(sample, f, config);
        } catch (const ComputationError& e) {
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
        if (a.result && b.result) {
            return a.result->ks < b.result->ks;
        }
        return a.result.has_value() && !b.result.has_value();
    });
    return out;
}

} // namespace cgf::distfit
