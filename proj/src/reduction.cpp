#include "qe/reduction.hpp"

#include "qe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace qe {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

constexpr double kChainSlack = 1e-8;
constexpr double kSchurTolerance = 1e-9;
constexpr double kPurityTolerance = 1e-9;
constexpr double kMaxCondition = 1e12;

// Solves (Re T) X = B for complex B with a real Cholesky factor.
MatrixXcd solve_real(const Eigen::LLT<MatrixXd>& llt, const MatrixXcd& rhs) {
    const MatrixXd re = llt.solve(rhs.real());
    const MatrixXd im = llt.solve(rhs.imag());
    MatrixXcd out(rhs.rows(), rhs.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

Eigen::LLT<MatrixXd> cholesky(const MatrixXd& m, const char* what) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw DomainError(std::string(what) + " is not positive definite");
    return llt;
}

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// ν within this of ½ is eigensolver roundoff; −δ ln δ would amplify it ~30x.
constexpr double kPureModeTolerance = 1e-12;

double entropy_term(double nu) {
    if (nu - 0.5 <= kPureModeTolerance) return 0.0;
    const double plus = nu + 0.5;
    const double minus = nu - 0.5;
    double s = plus * std::log(plus);
    if (minus > 0.0) s -= minus * std::log(minus);
    return s;
}

}  // namespace

Eigen::MatrixXcd densify(const GaussianPureState& state) {
    const std::size_t n = state.size();
    const auto& a = state.mode_symbols();
    const cdouble ref = a[0];

    std::vector<cdouble> twiddle(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        twiddle[q] = cdouble(std::cos(ang), std::sin(ang));
    }
    // entry(d) = (1/N) Σ_j a_j e^{2πijd/N}; the reference a_0 is split off so
    // equal symbols give an exactly diagonal matrix.
    std::vector<cdouble> entry(n);
    for (std::size_t d = 0; d < n; ++d) {
        cdouble s = 0.0;
        for (std::size_t j = 1; j < n; ++j) s += (a[j] - ref) * twiddle[(j * d) % n];
        entry[d] = s / static_cast<double>(n);
    }
    entry[0] += ref;
    // Symbols obey a_j = a_{N−j}, so entry(d) = entry(N−d); enforce it bitwise.
    for (std::size_t d = 1; d < n; ++d) {
        if (d < n - d) {
            const cdouble avg = 0.5 * (entry[d] + entry[n - d]);
            entry[d] = avg;
            entry[n - d] = avg;
        }
    }

    MatrixXcd A(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) A(k, l) = entry[(l + n - k) % n];
    }
    return A;
}

BlockPartition partition(const Eigen::MatrixXcd& A, std::size_t n) {
    const auto N = static_cast<std::size_t>(A.rows());
    if (A.rows() != A.cols()) throw DomainError("partition: matrix must be square");
    if (n == 0 || n >= N) throw DomainError("partition: cut must satisfy 0 < n < N");
    const auto m = static_cast<Eigen::Index>(N - n);
    const auto nn = static_cast<Eigen::Index>(n);

    Eigen::PartialPivLU<MatrixXcd> lu(A);
    const double rcond = lu.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition < kMaxCondition)) {
        throw IllConditionedError("partition: A is ill-conditioned (condition estimate " + std::to_string(condition) + ")",
                                  condition);
    }
    const MatrixXcd inv = lu.inverse();

    BlockPartition b;
    b.n = n;
    b.condition = condition;
    b.T = A.topLeftCorner(nn, nn);
    b.C = A.topRightCorner(nn, m);
    b.R = A.bottomRightCorner(m, m);
    b.Q = inv.topLeftCorner(nn, nn);
    b.D = inv.topRightCorner(nn, m);
    b.P = inv.bottomRightCorner(m, m);

    const auto re_llt = cholesky(A.real(), "Re A");
    const MatrixXd re_inv = re_llt.solve(MatrixXd::Identity(A.rows(), A.cols()));
    b.Pt = symmetrized(re_inv.bottomRightCorner(m, m));

    cholesky(b.T.real(), "Re T");
    cholesky(b.R.real(), "Re R");
    return b;
}

ReducedGaussianState reduce(const BlockPartition& blocks) {
    const auto t_llt = cholesky(blocks.T.real(), "Re T");
    const MatrixXcd Tinv_C = solve_real(t_llt, blocks.C);

    ReducedGaussianState r;
    r.Gamma = 0.5 * blocks.R - 0.25 * blocks.C.transpose() * Tinv_C;
    r.Delta = 0.25 * blocks.C.transpose() * Tinv_C.conjugate();

    const MatrixXd Ct = blocks.C.real();
    r.schur = symmetrized(blocks.R.real() - Ct.transpose() * t_llt.solve(Ct));

    const auto p_llt = cholesky(blocks.Pt, "P̃");
    const MatrixXd Pt_inv = p_llt.solve(MatrixXd::Identity(blocks.Pt.rows(), blocks.Pt.cols()));
    r.schur_residual = (Pt_inv - r.schur).cwiseAbs().maxCoeff();

    const double kept = static_cast<double>(blocks.kept());
    r.log_norm = 0.5 * logdet_spd(r.schur, "Schur complement") - 0.5 * kept * std::log(std::numbers::pi);
    return r;
}

double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
    const auto llt = cholesky(m, what);
    const MatrixXd& L = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

double log_purity_two_determinant(const ReducedGaussianState& reduced, const Eigen::MatrixXd& Pt) {
    const MatrixXd g = symmetrized(reduced.Gamma.real());
    const MatrixXd d = symmetrized(reduced.Delta.real());
    const double log_p_inv = -logdet_spd(Pt, "P̃");
    return log_p_inv - 0.5 * logdet_spd(2.0 * (g - d), "Γ̃ − Δ̃") - 0.5 * logdet_spd(2.0 * (g + d), "Γ̃ + Δ̃");
}

double log_purity_z_form(const BlockPartition& blocks) {
    const auto t_llt = cholesky(blocks.T.real(), "Re T");
    const MatrixXd Z = blocks.C.imag();
    const MatrixXd inner = symmetrized(blocks.R.real() + Z.transpose() * t_llt.solve(Z));
    return -0.5 * (logdet_spd(blocks.Pt, "P̃") + logdet_spd(inner, "R̃ + Zᵀ T̃⁻¹ Z"));
}

PurityTerms purity_terms(const BlockPartition& blocks) {
    const ReducedGaussianState reduced = reduce(blocks);
    PurityTerms p;
    p.two_determinant = log_purity_two_determinant(reduced, blocks.Pt);
    p.z_form = log_purity_z_form(blocks);
    p.purity = std::exp(p.z_form);
    if (std::abs(p.two_determinant - p.z_form) > kPurityTolerance) {
        throw NumericalError("purity routes disagree: ln tr ρ² = " + std::to_string(p.two_determinant) + " vs " +
                             std::to_string(p.z_form));
    }
    if (p.z_form > kPurityTolerance) throw NumericalError("purity exceeds 1");
    if (-p.z_form < det_bound(blocks) - kPurityTolerance) {
        throw NumericalError("purity exceeds [det P̃R̃]^{-1/2}");
    }
    return p;
}

double purity(const BlockPartition& blocks) { return purity_terms(blocks).purity; }

double det_bound(const BlockPartition& blocks) {
    return 0.5 * (logdet_spd(blocks.Pt, "P̃") + logdet_spd(symmetrized(blocks.R.real()), "R̃"));
}

std::vector<double> symplectic_spectrum(const Eigen::MatrixXcd& A, std::span<const std::size_t> kept) {
    const auto N = A.rows();
    const MatrixXd Ar = symmetrized(A.real());
    const MatrixXd Ai = symmetrized(A.imag());
    const auto llt = cholesky(Ar, "Re A");
    const MatrixXd Ar_inv = symmetrized(llt.solve(MatrixXd::Identity(N, N)));

    // ⟨xx⟩ = ½Ã⁻¹, ⟨pp⟩ = ½(Ã + ÂÃ⁻¹Â), ½⟨xp + px⟩ = −½Ã⁻¹Â.
    const MatrixXd xx = 0.5 * Ar_inv;
    const MatrixXd pp = symmetrized(0.5 * (Ar + Ai * Ar_inv * Ai));
    const MatrixXd xp = -0.5 * Ar_inv * Ai;

    const auto m = static_cast<Eigen::Index>(kept.size());
    MatrixXd gamma(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto a = static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)]);
            const auto b = static_cast<Eigen::Index>(kept[static_cast<std::size_t>(j)]);
            if (a >= N || b >= N) throw DomainError("symplectic_spectrum: kept index out of range");
            gamma(i, j) = xx(a, b);
            gamma(m + i, m + j) = pp(a, b);
            gamma(i, m + j) = xp(a, b);
            gamma(m + i, j) = xp(b, a);
        }
    }
    gamma = symmetrized(gamma);

    // ±ν are the eigenvalues of the Hermitian matrix i γ^{1/2} Ω γ^{1/2}.
    Eigen::SelfAdjointEigenSolver<MatrixXd> ges(gamma);
    if (ges.info() != Eigen::Success || ges.eigenvalues().minCoeff() <= 0.0) {
        throw NumericalError("covariance matrix is not positive definite");
    }
    const MatrixXd root = ges.operatorSqrt();
    MatrixXd omega = MatrixXd::Zero(2 * m, 2 * m);
    omega.topRightCorner(m, m) = MatrixXd::Identity(m, m);
    omega.bottomLeftCorner(m, m) = -MatrixXd::Identity(m, m);
    const MatrixXd w = root * omega * root;  // real antisymmetric
    MatrixXcd h = cdouble(0.0, 1.0) * w.cast<cdouble>();
    h = 0.5 * (h + h.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXcd> hes(h, Eigen::EigenvaluesOnly);
    if (hes.info() != Eigen::Success) throw NumericalError("symplectic eigenvalue solver failed");
    std::vector<double> nu(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) nu[static_cast<std::size_t>(i)] = hes.eigenvalues()(m + i);
    return nu;
}

double exact_entropy(const Eigen::MatrixXcd& A, std::span<const std::size_t> kept) {
    std::vector<std::size_t> all(static_cast<std::size_t>(A.rows()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (double nu : symplectic_spectrum(A, all)) {
        if (std::abs(nu - 0.5) > 1e-8) throw NumericalError("global state is not pure (ν = " + std::to_string(nu) + ")");
    }
    double s = 0.0;
    for (double nu : symplectic_spectrum(A, kept)) {
        if (nu < 0.5 - 1e-8) throw NumericalError("unphysical covariance: symplectic eigenvalue below 1/2");
        s += entropy_term(nu);
    }
    return s;
}

double exact_entropy(const Eigen::MatrixXcd& A, std::size_t n) {
    const auto N = static_cast<std::size_t>(A.rows());
    if (n == 0 || n >= N) throw DomainError("exact_entropy: cut must satisfy 0 < n < N");
    std::vector<std::size_t> kept(N - n);
    std::iota(kept.begin(), kept.end(), n);
    return exact_entropy(A, kept);
}

EntropyRecord entropy_record(const GaussianPureState& state, std::size_t n) {
    const MatrixXcd A = densify(state);
    const BlockPartition blocks = partition(A, n);
    const ReducedGaussianState reduced = reduce(blocks);
    if (!(reduced.schur_residual < kSchurTolerance)) {
        throw NumericalError("Schur identity residual " + std::to_string(reduced.schur_residual) + " exceeds 1e-9");
    }
    EntropyRecord rec;
    rec.t = state.time();
    rec.n = n;
    rec.N = state.size();
    rec.neg_log_purity = -purity_terms(blocks).z_form;
    rec.det_bound = det_bound(blocks);
    rec.exact_entropy = exact_entropy(A, n);
    if (rec.exact_entropy < rec.neg_log_purity - kChainSlack || rec.neg_log_purity < rec.det_bound - kChainSlack) {
        throw NumericalError("entropy bound chain violated at t = " + std::to_string(rec.t));
    }
    return rec;
}

}  // namespace qe
