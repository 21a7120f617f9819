#pragma once

// Thermodynamic-limit side: Fourier coefficients of ln Λ⁻¹ and Λ⁻¹, the
// strong-Szegő entropy bound, the b_k bound, the ς/μ split of Λ⁻¹, the μ_k
// light cone and least-squares growth fits.

#include "qe/spectral.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qe {

inline constexpr std::size_t kDefaultQuadPoints = 8192;

/// Fourier coefficients of a periodic symbol, k = 0..k_max, from the
/// trapezoidal rule on a uniform grid that is doubled until no coefficient
/// moves by more than 1e-9.
struct CoefficientSeries {
    std::vector<double> values;
    std::size_t quad_points = 0;   // grid actually used
    double doubling_change = 0.0;  // max |Δ| between the last two grids
    double max_imag = 0.0;
};

/// c_k = (1/2π)∫ ln Λ⁻¹(θ,t) e^{−ikθ} dθ.
CoefficientSeries log_symbol_coeffs(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t,
                                    std::size_t k_max, std::size_t quad_points = kDefaultQuadPoints);

/// b_k = (1/2π)∫ Λ⁻¹(θ,t) e^{−ikθ} dθ.
CoefficientSeries bk_coeffs(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                            std::size_t quad_points = kDefaultQuadPoints);

struct SzegoSum {
    double value = 0.0;  // Σ_{k=1}^{k_max} k c_k²
    double tail = 0.0;   // max k c_k² over the last 8 retained k
    bool tail_ok = true; // tail ≤ 1e-12 · value
    std::size_t suggested_k_max = 0;
};

SzegoSum szego_sum(std::span<const double> c);

/// (1/32π²)∫∫_{[−π,π]²} ln²[Λ(η₁−η₂)/Λ(η₁+η₂)] / sin²η₂, trapezoidal in η₁
/// and midpoint in η₂ (grid must be even).
double parseval_check(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t grid);

struct MuSigma {
    std::vector<double> sigma;  // (1/4π)∫ (λ+β²)/(βλ) cos kθ
    std::vector<double> mu;     // (1/4π)∫ (λ−β²)/(λβ) cos(2t√λ) cos kθ
    double recombination_residual = 0.0;  // max_k |b_k − ς_k − μ_k|
};

/// Rejects critical λ with CriticalSymbolError.
MuSigma mu_sigma(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                 std::size_t quad_points = kDefaultQuadPoints);

struct BkBound {
    double value = 0.0;       // (1/M²) Σ_{k≥1} k b_k²
    double M = 0.0;           // max_θ Λ⁻¹(θ,t)
    double max_lambda = 0.0;  // max_θ Λ(θ,t), reported for reference
};

BkBound bk_bound(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t, std::size_t k_max,
                 std::size_t quad_points = kDefaultQuadPoints);

/// k_max = ceil(4 v_g t) + 64 for gapped λ, 64 as the starting point for
/// critical λ.
std::size_t default_k_max(const TrigPolynomial& lambda, double t);

/// Szegő sum and b_k bound at one time, with the coefficient record.
struct FourierSeries {
    double t = 0.0;
    std::size_t k_max = 0;
    std::vector<double> c;
    std::vector<double> b;
    double M = 0.0;
    double max_lambda = 0.0;
    SzegoSum szego;
    double bk_bound = 0.0;
};

/// With k_max unset, starts at default_k_max and doubles until the tail
/// criterion holds. Throws NumericalError if bk_bound > szego + 1e-9 or the
/// tail criterion cannot be met.
FourierSeries szego_bounds(const TrigPolynomial& lambda, const TrigPolynomial& beta, double t,
                           std::optional<std::size_t> k_max = std::nullopt);

struct LightCone {
    std::vector<double> times;
    std::vector<std::vector<double>> abs_mu;  // [time][k]
    std::vector<std::size_t> edges;           // measured edge per time
    double group_velocity = 0.0;              // v_g
};

/// |μ_k(t)| for k = 0..k_max. The edge is the smallest k beyond which every
/// |μ_j| stays below 1e-6 of the profile maximum.
LightCone light_cone_profile(const TrigPolynomial& lambda, const TrigPolynomial& beta, std::span<const double> times,
                             std::size_t k_max);
std::size_t cone_edge(std::span<const double> abs_mu, double relative_threshold = 1e-6);

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    double kappa1 = 0.0;
    double kappa2 = 0.0;
};

/// Least-squares line on points with t in [window.first, window.second];
/// needs at least 10 of them.
GrowthFit fit_linear(std::span<const double> t, std::span<const double> value, std::pair<double, double> window);

struct ShortTimeFit {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double exponent = 0.0;  // log-log slope of value − value(0) (κ₁ if t = 0 is absent); NaN when it vanishes
};

/// value ≈ κ₁ + κ₂ t² on points with t ≤ t_max (at least 3).
ShortTimeFit fit_quadratic_short_time(std::span<const double> t, std::span<const double> value, double t_max);

/// Least-squares slope of ln y against ln x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace qe
