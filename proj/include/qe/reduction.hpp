#pragma once

// Reduced state of the last N − n oscillators of a circulant Gaussian state,
// its purity, the determinant lower bound and the exact von Neumann entropy.

#include "qe/evolution.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace qe {

/// Circulant matrix whose discrete-Fourier eigenvalues are the mode symbols.
Eigen::MatrixXcd densify(const GaussianPureState& state);

/// Blocks of A (T, C, R) and of A⁻¹ (Q, D, P) for a cut after the first n
/// sites. `Pt` is the kept block of (Re A)⁻¹, the matrix written P̃ in the
/// purity and bound formulas; its inverse is the Schur complement of Re A.
struct BlockPartition {
    std::size_t n = 0;
    Eigen::MatrixXcd T, C, R;
    Eigen::MatrixXcd Q, D, P;
    Eigen::MatrixXd Pt;
    double condition = 0.0;  // 1 / rcond estimate of A

    std::size_t kept() const noexcept { return static_cast<std::size_t>(R.rows()); }
};

/// Requires 0 < n < N and cond(A) < 1e12 (IllConditionedError otherwise).
BlockPartition partition(const Eigen::MatrixXcd& A, std::size_t n);

/// ρ_R(x, x') = 𝒩 exp(−xᵀΓx − x'ᵀΓ*x' + xᵀΔx' + x'ᵀΔ*x).
struct ReducedGaussianState {
    Eigen::MatrixXcd Gamma;
    Eigen::MatrixXcd Delta;
    double log_norm = 0.0;        // ln 𝒩 = ½ ln det P̃⁻¹ − ((N−n)/2) ln π
    Eigen::MatrixXd schur;        // Re R − Re Cᵀ (Re T)⁻¹ Re C
    double schur_residual = 0.0;  // max |P̃⁻¹ − schur|, P̃ from direct inversion
};

ReducedGaussianState reduce(const BlockPartition& blocks);

/// ln tr ρ² from the Gaussian double integral:
/// ln det P̃⁻¹ − ½ ln det[2(Γ̃ − Δ̃)] − ½ ln det[2(Γ̃ + Δ̃)].
/// Takes Γ, Δ as given so a corrupted kernel can be checked against the
/// Z-form route.
double log_purity_two_determinant(const ReducedGaussianState& reduced, const Eigen::MatrixXd& Pt);

/// ln tr ρ² = −½ ln det[P̃ (R̃ + Zᵀ T̃⁻¹ Z)], Z = Im C.
double log_purity_z_form(const BlockPartition& blocks);

struct PurityTerms {
    double two_determinant;  // ln tr ρ², Gaussian-integral route
    double z_form;           // ln tr ρ², simplified route
    double purity;           // exp(z_form)
};

/// Both routes; throws NumericalError when they differ by more than 1e-9 or
/// when purity exceeds 1 or [det P̃R̃]^{−1/2}.
PurityTerms purity_terms(const BlockPartition& blocks);
double purity(const BlockPartition& blocks);

/// ½ ln det(P̃ R̃) via Cholesky log-determinants.
double det_bound(const BlockPartition& blocks);

/// ln det of a symmetric positive definite matrix. Throws DomainError otherwise.
double logdet_spd(const Eigen::MatrixXd& m, const char* what);

/// Symplectic eigenvalues (each ≥ ½ for a physical state) of the covariance
/// restricted to `kept`.
std::vector<double> symplectic_spectrum(const Eigen::MatrixXcd& A, std::span<const std::size_t> kept);

/// Von Neumann entropy (nats) of the modes in `kept`. Verifies that the
/// global state is pure.
double exact_entropy(const Eigen::MatrixXcd& A, std::span<const std::size_t> kept);
/// Entropy of sites n..N−1.
double exact_entropy(const Eigen::MatrixXcd& A, std::size_t n);

struct EntropyRecord {
    double t = 0.0;
    double exact_entropy = 0.0;
    double neg_log_purity = 0.0;
    double det_bound = 0.0;
    std::size_t n = 0;
    std::size_t N = 0;
};

/// All dense-route quantities for one state. Throws NumericalError if
/// exact ≥ −ln purity ≥ det bound fails by more than 1e-8 or the Schur
/// identity residual exceeds 1e-9.
EntropyRecord entropy_record(const GaussianPureState& state, std::size_t n);

}  // namespace qe
