#include "qe/evolution.hpp"

#include "qe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qe {

namespace {

// sin(x)/x with a series near zero.
double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double clamp_lambda(double lambda_value) {
    if (!(lambda_value >= 0.0)) {
        if (lambda_value > -1e-12) return 0.0;
        throw DomainError("λ sample must be non-negative");
    }
    return lambda_value;
}

}  // namespace

void EvolutionSetup::validate() const {
    if (N == 0) throw DomainError("system size N must be positive");
    require_positive(beta, "initial-state symbol β");
    require_positive(lambda, "Hamiltonian symbol λ", /*allow_zero=*/true);
}

GaussianPureState::GaussianPureState(std::vector<cdouble> mode_symbols, double time)
    : modes_(std::move(mode_symbols)), time_(time) {
    if (modes_.empty()) throw DomainError("state needs at least one mode");
    for (const auto& a : modes_) {
        if (!(a.real() > 0.0)) throw NumericalError("mode symbol with non-positive real part: state not normalizable");
    }
}

std::string GaussianPureState::to_json() const {
    std::string out = "{\"N\": " + std::to_string(modes_.size());
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", time_);
    out += ", \"t\": ";
    out += buf;
    for (int part = 0; part < 2; ++part) {
        out += part == 0 ? ", \"re\": [" : "], \"im\": [";
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", part == 0 ? modes_[j].real() : modes_[j].imag());
            if (j) out += ", ";
            out += buf;
        }
    }
    out += "]}";
    return out;
}

cdouble mode_symbol(double lambda_value, double beta_value, double t) {
    const double lam = clamp_lambda(lambda_value);
    const double tau = t * std::sqrt(lam);
    const double c = std::cos(tau);
    const double ts = t * sinc(tau);
    return cdouble(beta_value * c, lam * ts) / cdouble(c, beta_value * ts);
}

double lambda_of_t(double lambda_value, double beta_value, double t) {
    const double lam = clamp_lambda(lambda_value);
    const double tau = t * std::sqrt(lam);
    const double c = std::cos(tau);
    const double bts = beta_value * t * sinc(tau);
    return beta_value / (c * c + bts * bts);
}

double lambda_of_t(const TrigPolynomial& lambda, const TrigPolynomial& beta, double theta, double t) {
    return lambda_of_t(lambda(theta), beta(theta), t);
}

double inverse_lambda_of_t(double lambda_value, double beta_value, double t) {
    const double lam = clamp_lambda(lambda_value);
    const double tau = t * std::sqrt(lam);
    const double c = std::cos(tau);
    const double bts = beta_value * t * sinc(tau);
    return (c * c + bts * bts) / beta_value;
}

double short_time_lambda(double lambda_value, double beta_value, double t) {
    return beta_value * (1.0 - (beta_value * beta_value - lambda_value) * t * t);
}

double short_time_lambda(const TrigPolynomial& lambda, const TrigPolynomial& beta, double theta, double t) {
    return short_time_lambda(lambda(theta), beta(theta), t);
}

GaussianPureState evolve(const EvolutionSetup& setup, double t) {
    setup.validate();
    const auto lam = sample_nonnegative(setup.lambda, setup.N);
    const auto bet = sample(setup.beta, setup.N);
    std::vector<cdouble> modes(setup.N);
    for (std::size_t j = 0; j < setup.N; ++j) modes[j] = mode_symbol(lam[j], bet[j], t);
    return GaussianPureState(std::move(modes), t);
}

GaussianPureState riccati_oracle(const EvolutionSetup& setup, double t_end, double dt) {
    setup.validate();
    const auto lam = sample_nonnegative(setup.lambda, setup.N);
    const auto bet = sample(setup.beta, setup.N);
    if (dt <= 0.0) {
        const double lmax = *std::max_element(lam.begin(), lam.end());
        const double bmax = *std::max_element(bet.begin(), bet.end());
        const double bmin = *std::min_element(bet.begin(), bet.end());
        // |a| stays within [min(β, λ/β), max(β, λ/β)]
        dt = 0.01 / std::max({std::sqrt(lmax), bmax, lmax / bmin, 1.0});
    }
    const auto steps = static_cast<long>(std::ceil(std::abs(t_end) / dt));
    const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    const cdouble minus_i(0.0, -1.0);

    std::vector<cdouble> modes(setup.N);
    for (std::size_t j = 0; j < setup.N; ++j) {
        const double l = lam[j];
        auto rhs = [&](cdouble a) { return minus_i * (a * a - l); };
        cdouble a = bet[j];
        for (long s = 0; s < steps; ++s) {
            const cdouble k1 = rhs(a);
            const cdouble k2 = rhs(a + 0.5 * h * k1);
            const cdouble k3 = rhs(a + 0.5 * h * k2);
            const cdouble k4 = rhs(a + h * k3);
            a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!(std::abs(a) < 1e8)) {
                throw NumericalError("Riccati integration diverged at mode " + std::to_string(j) +
                                     "; reduce the step size");
            }
        }
        modes[j] = a;
    }
    return GaussianPureState(std::move(modes), t_end);
}

}  // namespace qe
