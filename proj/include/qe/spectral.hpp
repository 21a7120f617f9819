#pragma once

// Even real trigonometric polynomials f(θ) = a_0 + Σ_{m=1..K} a_m cos(mθ)
// and the real symmetric circulant matrices they generate.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qe {

class TrigPolynomial {
public:
    TrigPolynomial() : coeffs_{0.0} {}
    explicit TrigPolynomial(std::vector<double> cosine_coeffs);

    static TrigPolynomial constant(double value) { return TrigPolynomial({value}); }

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    double operator()(double theta) const;
    /// df/dθ
    double derivative(double theta) const;

    /// Sum of |a_m|; bounds |f| and sets the scale for positivity tolerances.
    double abs_sum() const noexcept;

    friend bool operator==(const TrigPolynomial&, const TrigPolynomial&) = default;

private:
    std::vector<double> coeffs_;
};

double eval(const TrigPolynomial& f, double theta);

/// (c − cos θ)², expanded to (c² + ½) − 2c cos θ + ½ cos 2θ.
TrigPolynomial from_gap_family(double c);

/// True when c ≤ 1, i.e. (c − cos θ)² has a real zero at θ = arccos(c).
bool gap_family_is_critical(double c);

/// Parses `poly:a0,a1,...,aK` or `gap:c=<value>`. Throws ConfigError.
TrigPolynomial parse_spectral_spec(std::string_view spec);
std::string format_spectral_spec(const TrigPolynomial& f);

class CirculantMatrix {
public:
    explicit CirculantMatrix(std::vector<double> first_row);

    std::size_t size() const noexcept { return first_row_.size(); }
    const std::vector<double>& first_row() const noexcept { return first_row_; }

    /// Entry (k, l) = first_row[(l − k) mod N].
    double operator()(std::size_t row, std::size_t col) const;

    /// Eigenvalues in discrete-Fourier order j = 0..N−1.
    std::vector<double> fourier_eigenvalues() const;

private:
    std::vector<double> first_row_;
};

/// V_kl = (1/2π)∫ f(θ) e^{−i(k−l)θ} dθ with cyclic wrap. Requires N > 2K.
CirculantMatrix build_circulant(const TrigPolynomial& f, std::size_t n);

struct Extrema {
    double min;
    double max;
    double argmin;
    double argmax;
};

/// Grid scan over [0, 2π) followed by bisection on f' around each grid
/// extremum. grid_size must be at least 4K (and at least 4).
Extrema extrema(const TrigPolynomial& f, std::size_t grid_size = 4096);

/// Absolute tolerance under which a minimum counts as zero.
double criticality_tolerance(const TrigPolynomial& f);

/// min f ≤ tolerance (touches zero within rounding).
bool is_critical(const TrigPolynomial& f);

/// Throws DomainError unless min f > tolerance (or ≥ −tolerance when
/// allow_zero is set). `what` names the symbol in the message.
void require_positive(const TrigPolynomial& f, std::string_view what, bool allow_zero = false);

/// v_g = K · max λ / √(min λ). Throws CriticalSymbolError when min λ = 0.
double group_velocity_bound(const TrigPolynomial& lambda);

/// f sampled at θ_j = 2πj/n.
std::vector<double> sample(const TrigPolynomial& f, std::size_t n);

/// f sampled at θ_j = 2π(j + offset)/n, clamping rounding-level negatives to 0.
std::vector<double> sample_nonnegative(const TrigPolynomial& f, std::size_t n, double offset = 0.0);

}  // namespace qe
