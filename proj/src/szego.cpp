#include "qe/szego.hpp"

#include "qe/errors.hpp"
#include "qe/evolution.hpp"
#include "qe/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace qe {

namespace {

constexpr double kCoefficientTolerance = 1e-9;
constexpr std::size_t kMaxQuadPoints = std::size_t{1} << 22;
constexpr std::size_t kMaxAutoKmax = std::size_t{1} << 18;
constexpr double kBoundSlack = 1e-9;

using Sampler = std::function<std::vector<double>(std::size_t)>;

CoefficientSeries converged_coefficients(const Sampler& sampler, std::size_t k_max, std::size_t quad_points) {
    std::size_t q = next_pow2(std::max({quad_points, 8 * k_max, 2 * k_max + 2, std::size_t{8}}));
    FourierCoefficients coarse = fourier_coefficients(sampler(q), k_max);
    while (true) {
        if (2 * q > kMaxQuadPoints) {
            throw NumericalError("quadrature did not converge within " + std::to_string(kMaxQuadPoints) + " points");
        }
        q *= 2;
        FourierCoefficients fine = fourier_coefficients(sampler(q), k_max);
        double change = 0.0;
        for (std::size_t k = 0; k <= k_max; ++k) change = std::max(change, std::abs(fine.re[k] - coarse.re[k]));
        if (change <= kCoefficientTolerance) {
            return CoefficientSeries{std::move(fine.re), q, change, fine.max_imag};
        }
        coarse = std::move(fine);
    }
}

std::vector<double> sampled_inverse_lambda(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t,
                                           std::size_t q) {
    const auto lam = sample_nonnegative(lambda, q);
    const auto bet = sample(beta, q);
    std::vector<double> out(q);
    for (std::size_t j = 0; j < q; ++j) out[j] = inverse_lambda_of_t(lam[j], bet[j], t);
    return out;
}

void require_beta(const TrigPolynomial& beta) { require_positive(beta, "initial-state symbol β"); }

// Golden-section search for the maximum of g on [a, b].
double golden_max(const std::function<double(double)>& g, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double g1 = g(x1);
    double g2 = g(x2);
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        if (g1 < g2) {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g(x1);
        }
    }
    return std::max({g1, g2, g(0.5 * (a + b))});
}

// max_θ g(θ): uniform scan plus golden-section refinement of every local maximum.
double periodic_max(const std::function<double(double)>& g, std::size_t grid) {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(grid);
    std::vector<double> v(grid);
    for (std::size_t i = 0; i < grid; ++i) v[i] = g(h * static_cast<double>(i));
    double best = *std::max_element(v.begin(), v.end());
    for (std::size_t i = 0; i < grid; ++i) {
        const double prev = v[(i + grid - 1) % grid];
        const double next = v[(i + 1) % grid];
        if (v[i] >= prev && v[i] >= next) {
            const double theta = h * static_cast<double>(i);
            best = std::max(best, golden_max(g, theta - h, theta + h));
        }
    }
    return best;
}

}  // namespace

CoefficientSeries log_symbol_coeffs(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t,
                                    std::size_t k_max, std::size_t quad_points) {
    require_beta(beta);
    return converged_coefficients(
        [&](std::size_t q) {
            auto v = sampled_inverse_lambda(lambda, beta, t, q);
            for (double& x : v) x = std::log(x);
            return v;
        },
        k_max, quad_points);
}

CoefficientSeries bk_coeffs(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                            std::size_t quad_points) {
    require_beta(beta);
    return converged_coefficients([&](std::size_t q) { return sampled_inverse_lambda(lambda, beta, t, q); }, k_max,
                                  quad_points);
}

SzegoSum szego_sum(std::span<const double> c) {
    SzegoSum s;
    const std::size_t k_max = c.empty() ? 0 : c.size() - 1;
    for (std::size_t k = 1; k <= k_max; ++k) s.value += static_cast<double>(k) * c[k] * c[k];
    const std::size_t first = k_max > 8 ? k_max - 7 : 1;
    for (std::size_t k = first; k <= k_max; ++k) s.tail = std::max(s.tail, static_cast<double>(k) * c[k] * c[k]);
    s.tail_ok = s.tail <= 1e-12 * s.value;
    s.suggested_k_max = s.tail_ok ? k_max : std::max<std::size_t>(2 * k_max, 64);
    return s;
}

double parseval_check(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t grid) {
    if (grid < 2 || grid % 2 != 0) throw DomainError("parseval_check: grid must be even");
    require_beta(beta);
    // ln Λ on the half-offset grid θ = 2π(i + ½)/G; both η₁ ± η₂ land on it.
    const auto lam = sample_nonnegative(lambda, grid, 0.5);
    const auto bet = sample_nonnegative(beta, grid, 0.5);
    std::vector<double> log_l(grid);
    for (std::size_t i = 0; i < grid; ++i) log_l[i] = std::log(lambda_of_t(lam[i], bet[i], t));

    const double g = static_cast<double>(grid);
    double total = 0.0;
    for (std::size_t m = 0; m < grid; ++m) {
        const double s = std::sin(2.0 * std::numbers::pi * (static_cast<double>(m) + 0.5) / g);
        double inner = 0.0;
        for (std::size_t j = 0; j < grid; ++j) {
            const double d = log_l[(j + 2 * grid - m - 1) % grid] - log_l[(j + m) % grid];
            inner += d * d;
        }
        total += inner / (s * s);
    }
    // (2π/G)² / (32π²)
    return total / (8.0 * g * g);
}

MuSigma mu_sigma(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                 std::size_t quad_points) {
    if (is_critical(lambda)) {
        throw CriticalSymbolError("ς/μ decomposition requires a gapped λ (min λ > 0)");
    }
    require_beta(beta);
    auto sigma_series = converged_coefficients(
        [&](std::size_t q) {
            const auto lam = sample(lambda, q);
            const auto bet = sample(beta, q);
            std::vector<double> v(q);
            for (std::size_t j = 0; j < q; ++j) v[j] = (lam[j] + bet[j] * bet[j]) / (bet[j] * lam[j]);
            return v;
        },
        k_max, quad_points);
    auto mu_series = converged_coefficients(
        [&](std::size_t q) {
            const auto lam = sample(lambda, q);
            const auto bet = sample(beta, q);
            std::vector<double> v(q);
            for (std::size_t j = 0; j < q; ++j) {
                v[j] = (lam[j] - bet[j] * bet[j]) / (lam[j] * bet[j]) * std::cos(2.0 * t * std::sqrt(lam[j]));
            }
            return v;
        },
        k_max, quad_points);

    MuSigma out;
    out.sigma = std::move(sigma_series.values);
    out.mu = std::move(mu_series.values);
    for (double& x : out.sigma) x *= 0.5;
    for (double& x : out.mu) x *= 0.5;

    const auto b = bk_coeffs(lambda, beta, t, k_max, quad_points);
    for (std::size_t k = 0; k <= k_max; ++k) {
        out.recombination_residual = std::max(out.recombination_residual, std::abs(b.values[k] - out.sigma[k] - out.mu[k]));
    }
    return out;
}

BkBound bk_bound(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                 std::size_t quad_points) {
    const auto b = bk_coeffs(lambda, beta, t, k_max, quad_points);
    auto inv = [&](double theta) {
        return inverse_lambda_of_t(std::max(lambda(theta), 0.0), beta(theta), t);
    };
    BkBound out;
    out.M = periodic_max(inv, kDefaultQuadPoints);
    out.max_lambda = 1.0 / -periodic_max([&](double theta) { return -inv(theta); }, kDefaultQuadPoints);
    double sum = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) sum += static_cast<double>(k) * b.values[k] * b.values[k];
    out.value = sum / (out.M * out.M);
    return out;
}

std::size_t default_k_max(const TrigPolynomial& lambda, double t) {
    if (is_critical(lambda)) return 64;
    return static_cast<std::size_t>(std::ceil(4.0 * group_velocity_bound(lambda) * std::abs(t))) + 64;
}

FourierSeries szego_bounds(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t,
                           std::optional<std::size_t> k_max) {
    FourierSeries fs;
    fs.t = t;
    std::size_t k = k_max.value_or(default_k_max(lambda, t));
    while (true) {
        auto c = log_symbol_coeffs(lambda, beta, t, k);
        fs.szego = szego_sum(c.values);
        fs.c = std::move(c.values);
        if (fs.szego.tail_ok || k_max.has_value()) break;
        if (2 * k > kMaxAutoKmax) throw NumericalError("Szegő tail criterion not met up to k_max = " + std::to_string(k));
        k *= 2;
    }
    fs.k_max = k;
    const BkBound bk = bk_bound(lambda, beta, t, k);
    fs.b = bk_coeffs(lambda, beta, t, k).values;
    fs.M = bk.M;
    fs.max_lambda = bk.max_lambda;
    fs.bk_bound = bk.value;
    if (fs.bk_bound > fs.szego.value + kBoundSlack) {
        throw NumericalError("b_k bound exceeds the Szegő sum at t = " + std::to_string(t));
    }
    return fs;
}

std::size_t cone_edge(std::span<const double> abs_mu, double relative_threshold) {
    if (abs_mu.empty()) return 0;
    const double peak = *std::max_element(abs_mu.begin(), abs_mu.end());
    if (peak <= 0.0) return 0;
    for (std::size_t k = abs_mu.size(); k-- > 0;) {
        if (abs_mu[k] >= relative_threshold * peak) return k + 1;
    }
    return 0;
}

LightCone light_cone_profile(const TrigPolynomial& lambda, const TrigPolynomial& beta, std::span<const double> times,
                             std::size_t k_max) {
    LightCone cone;
    cone.group_velocity = group_velocity_bound(lambda);
    for (double t : times) {
        const MuSigma ms = mu_sigma(lambda, beta, t, k_max);
        std::vector<double> row(ms.mu.size());
        std::transform(ms.mu.begin(), ms.mu.end(), row.begin(), [](double x) { return std::abs(x); });
        cone.edges.push_back(cone_edge(row));
        cone.abs_mu.push_back(std::move(row));
        cone.times.push_back(t);
    }
    return cone;
}

namespace {

struct LineFit {
    double slope, intercept, r_squared;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("degenerate fit window: abscissae coincide");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        ss_res += r * r;
    }
    const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return {slope, intercept, r2};
}

}  // namespace

GrowthFit fit_linear(std::span<const double> t, std::span<const double> value, std::pair<double, double> window) {
    if (t.size() != value.size()) throw DomainError("fit_linear: series lengths differ");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= window.first - 1e-12 && t[i] <= window.second + 1e-12) {
            x.push_back(t[i]);
            y.push_back(value[i]);
        }
    }
    if (x.size() < 10) throw DomainError("fit_linear: fewer than 10 points in the window");
    const LineFit f = least_squares(x, y);
    GrowthFit g;
    g.slope = f.slope;
    g.intercept = f.intercept;
    g.r_squared = f.r_squared;
    g.window = window;
    return g;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return least_squares(lx, ly).slope;
}

ShortTimeFit fit_quadratic_short_time(std::span<const double> t, std::span<const double> value, double t_max) {
    if (t.size() != value.size()) throw DomainError("fit_quadratic_short_time: series lengths differ");
    std::vector<double> ts, u, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i]) <= t_max) {
            ts.push_back(std::abs(t[i]));
            u.push_back(t[i] * t[i]);
            y.push_back(value[i]);
        }
    }
    if (u.size() < 3) throw DomainError("fit_quadratic_short_time: fewer than 3 points with t ≤ t_max");
    const LineFit f = least_squares(u, y);
    ShortTimeFit out;
    out.kappa1 = f.intercept;
    out.kappa2 = f.slope;
    // Excess over the t = 0 value when sampled, else over κ₁.
    double base = out.kappa1;
    const auto first = std::min_element(ts.begin(), ts.end());
    if (*first == 0.0) base = y[static_cast<std::size_t>(first - ts.begin())];
    std::vector<double> excess(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) excess[i] = y[i] - base;
    out.exponent = loglog_slope(ts, excess);
    return out;
}

}  // namespace qe
