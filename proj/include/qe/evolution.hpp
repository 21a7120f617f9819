#pragma once

// Exact Gaussian evolution of the quenched chain, one Fourier mode at a time.
// The state is ψ(x, t) ∝ exp(−½ xᵀ A(t) x) with A(t) circulant, so it is
// stored as the symbol a(θ_j, t) at θ_j = 2πj/N.

#include "qe/spectral.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace qe {

using cdouble = std::complex<double>;

struct EvolutionSetup {
    TrigPolynomial lambda;  // Hamiltonian coupling symbol λ(θ) ≥ 0
    TrigPolynomial beta;    // initial-state symbol β(θ) > 0
    std::size_t N = 0;

    /// Checks β > 0, λ ≥ 0 (zero allowed: critical) and N ≥ 1.
    void validate() const;
};

class GaussianPureState {
public:
    GaussianPureState(std::vector<cdouble> mode_symbols, double time);

    std::size_t size() const noexcept { return modes_.size(); }
    double time() const noexcept { return time_; }
    const std::vector<cdouble>& mode_symbols() const noexcept { return modes_; }

    /// {"N": .., "t": .., "re": [...], "im": [...]}
    std::string to_json() const;

private:
    std::vector<cdouble> modes_;
    double time_;
};

/// a = (β cos τ + i λ t sinc τ) / (cos τ + i β t sinc τ), τ = t√λ.
/// Algebraically equal to √λ(β cos τ + i√λ sin τ)/(√λ cos τ + iβ sin τ) and
/// reduces to β/(1 + itβ) at λ = 0.
cdouble mode_symbol(double lambda_value, double beta_value, double t);

/// Λ = β / (cos²τ + β² t² sinc²τ) = βλ / (λ cos²τ + β² sin²τ): the real part
/// of mode_symbol.
double lambda_of_t(double lambda_value, double beta_value, double t);
double lambda_of_t(const TrigPolynomial& lambda, const TrigPolynomial& beta, double theta, double t);

/// 1/Λ, finite for every λ ≥ 0, β > 0.
double inverse_lambda_of_t(double lambda_value, double beta_value, double t);

/// Quadratic approximant β[1 − (β² − λ)t²].
double short_time_lambda(double lambda_value, double beta_value, double t);
double short_time_lambda(const TrigPolynomial& lambda, const TrigPolynomial& beta, double theta, double t);

/// Closed-form symbols at time t.
GaussianPureState evolve(const EvolutionSetup& setup, double t);

/// Independent check of the closed form: integrates i ȧ = a² − λ per mode
/// with classical RK4 from a(0) = β. dt ≤ 0 selects the default
/// 0.01 / max(√max λ, max β, max λ / min β, 1). Throws NumericalError if |a| exceeds 1e8.
GaussianPureState riccati_oracle(const EvolutionSetup& setup, double t_end, double dt = 0.0);

}  // namespace qe
