#include <doctest.h>

#include "oracles.hpp"
#include "qe/errors.hpp"
#include "qe/evolution.hpp"
#include "qe/fourier.hpp"
#include "qe/szego.hpp"

#include <cmath>
#include <random>

using namespace qe;

namespace {

const TrigPolynomial kOne = TrigPolynomial::constant(1.0);
const TrigPolynomial kGap = from_gap_family(1.5);

}  // namespace

TEST_CASE("fourier_coefficients against a direct sum") {
    std::vector<double> f(64);
    for (std::size_t j = 0; j < 64; ++j) {
        const double th = 2.0 * oracle::pi * static_cast<double>(j) / 64.0;
        f[j] = std::exp(std::cos(th)) + 0.3 * std::cos(3 * th);
    }
    const auto c = fourier_coefficients(f, 32);
    for (int k = 0; k <= 32; ++k) {
        const double ref = oracle::cosine_coefficient([](double th) { return std::exp(std::cos(th)) + 0.3 * std::cos(3 * th); },
                                                      k, 64);
        CHECK(std::abs(c.re[static_cast<std::size_t>(k)] - ref) < 1e-15);
    }
    CHECK(c.max_imag < 1e-15);

    const auto z = fourier_coefficients(std::vector<double>(128, 0.7), 64);
    CHECK(z.re[0] == 0.7);
    for (std::size_t k = 1; k <= 64; ++k) CHECK(z.re[k] == 0.0);
    CHECK_THROWS_AS(fourier_coefficients(f, 33), DomainError);
}

TEST_CASE("log-symbol coefficients: trivial and stationary cases") {
    const auto c0 = log_symbol_coeffs(kGap, kOne, 0.0, 32);
    for (double x : c0.values) CHECK(x == 0.0);

    const TrigPolynomial root({1.5, -1.0});
    const auto a = log_symbol_coeffs(kGap, root, 0.0, 32);
    const auto b = log_symbol_coeffs(kGap, root, 17.0, 32);
    for (std::size_t k = 0; k <= 32; ++k) CHECK(std::abs(a.values[k] - b.values[k]) < 1e-12);
}

TEST_CASE("log-symbol coefficients are stable under grid doubling") {
    const auto c = log_symbol_coeffs(kGap, kOne, 4.0, 200, 2048);
    CHECK(c.doubling_change < 1e-10);
    CHECK(c.max_imag < 1e-12);
    const auto finer = log_symbol_coeffs(kGap, kOne, 4.0, 200, 2 * c.quad_points);
    for (std::size_t k = 0; k <= 200; ++k) CHECK(std::abs(c.values[k] - finer.values[k]) < 1e-10);
    // independent long-double quadrature for a few k
    auto f = [](double th) {
        return -std::log(lambda_of_t((1.5 - std::cos(th)) * (1.5 - std::cos(th)), 1.0, 4.0));
    };
    for (int k : {0, 1, 5, 20}) {
        CHECK(std::abs(c.values[static_cast<std::size_t>(k)] - oracle::cosine_coefficient(f, k, 8192)) < 1e-12);
    }
}

TEST_CASE("szego_sum") {
    const std::vector<double> zeros(20, 0.0);
    const auto s0 = szego_sum(zeros);
    CHECK(s0.value == 0.0);
    CHECK(s0.tail_ok);

    const std::vector<double> c{9.0, 0.5, 0.25, 0.0};
    CHECK(szego_sum(c).value == doctest::Approx(0.25 + 2 * 0.0625).epsilon(1e-15));

    std::vector<double> slow(16, 0.1);
    const auto s = szego_sum(slow);
    CHECK_FALSE(s.tail_ok);
    CHECK(s.suggested_k_max > 15);

    CHECK(szego_bounds(kGap, kOne, 0.0).szego.value == 0.0);
}

TEST_CASE("parseval double integral reproduces the Szegő sum") {
    CHECK(parseval_check(TrigPolynomial::constant(2.0), TrigPolynomial::constant(0.7), 3.0, 64) == 0.0);
    CHECK(parseval_check(kGap, kOne, 0.0, 64) == 0.0);
    for (double t : {1.0, 3.0}) {
        const double direct = szego_sum(log_symbol_coeffs(kGap, kOne, t, 512).values).value;
        const double pars = parseval_check(kGap, kOne, t, 1024);
        CHECK(std::abs(pars - direct) <= 1e-4 * direct);
    }
    CHECK_THROWS_AS(parseval_check(kGap, kOne, 1.0, 63), DomainError);
}

TEST_CASE("b_k coefficients") {
    const auto one = bk_coeffs(kGap, kOne, 0.0, 16);
    CHECK(one.values[0] == 1.0);
    for (std::size_t k = 1; k <= 16; ++k) CHECK(one.values[k] == 0.0);

    const TrigPolynomial beta({1.3, 0.4});
    const auto b0 = bk_coeffs(kGap, beta, 0.0, 16);
    for (int k = 0; k <= 16; ++k) {
        const double ref = oracle::cosine_coefficient([&](double th) { return 1.0 / beta(th); }, k, 4096);
        CHECK(std::abs(b0.values[static_cast<std::size_t>(k)] - ref) < 1e-13);
    }
}

TEST_CASE("sigma/mu split recombines to b_k") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const auto lam = oracle::random_positive(rng, 3);
        const auto beta = oracle::random_positive(rng, 3);
        const auto ms = mu_sigma(lam, beta, 2.5, 64);
        CHECK(ms.recombination_residual < 1e-10);
    }
    const TrigPolynomial root({1.5, -1.0});
    for (double t : {0.0, 3.0}) {
        const auto ms = mu_sigma(kGap, root, t, 32);
        for (double m : ms.mu) CHECK(std::abs(m) < 1e-12);
    }
    // t = 0: μ_k is the plain coefficient of (λ − β²)/(2λβ)
    const TrigPolynomial beta({1.1, 0.3});
    const auto ms0 = mu_sigma(kGap, beta, 0.0, 8);
    for (int k = 0; k <= 8; ++k) {
        const double ref = oracle::cosine_coefficient(
            [&](double th) { return (kGap(th) - beta(th) * beta(th)) / (2.0 * kGap(th) * beta(th)); }, k, 4096);
        CHECK(std::abs(ms0.mu[static_cast<std::size_t>(k)] - ref) < 1e-13);
    }
    CHECK_THROWS_AS(mu_sigma(from_gap_family(1.0), kOne, 1.0, 8), CriticalSymbolError);
}

TEST_CASE("b_k bound sits below the Szegő sum") {
    CHECK(bk_bound(TrigPolynomial::constant(2.0), TrigPolynomial::constant(1.0), 4.0, 16).value == 0.0);
    for (double c : {0.5, 1.0, 1.5, 2.5}) {
        for (double t : {0.5, 3.0, 12.0}) {
            const auto fs = szego_bounds(from_gap_family(c), kOne, t);
            CHECK(fs.bk_bound >= 0.0);
            CHECK(fs.bk_bound <= fs.szego.value + 1e-9);
            CHECK(fs.szego.tail_ok);
            // M really is max Λ⁻¹ on a fine grid
            const auto [lo, hi] = oracle::grid_extrema(
                [&](double th) { return inverse_lambda_of_t(std::max(from_gap_family(c)(th), 0.0), 1.0, t); }, 200000);
            CHECK(fs.M >= hi - 1e-12);
            CHECK(fs.M <= hi * (1 + 1e-6));
        }
    }
    const TrigPolynomial root({1.5, -1.0});
    const double b0 = bk_bound(kGap, root, 0.0, 32).value;
    CHECK(bk_bound(kGap, root, 9.0, 32).value == doctest::Approx(b0).epsilon(1e-10));
}

TEST_CASE("default k_max follows the light cone") {
    CHECK(default_k_max(kGap, 2.0) == 264);
    CHECK(default_k_max(from_gap_family(0.5), 2.0) == 64);
}

TEST_CASE("light cone of mu_k") {
    const std::vector<double> times{0.0, 2.0};
    const auto cone = light_cone_profile(kGap, kOne, times, 200);
    CHECK(cone.group_velocity == doctest::Approx(25.0));
    CHECK(cone.edges[0] < 40);
    CHECK(static_cast<double>(cone.edges[1]) <= 25.0 * 2.0);

    // the edge grows linearly once the cone dominates the smoothness tail
    const std::vector<double> late{25.0, 50.0};
    const auto c2 = light_cone_profile(kGap, kOne, late, 600);
    const double ratio = static_cast<double>(c2.edges[1]) / static_cast<double>(c2.edges[0]);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);

    const std::vector<double> prof{1.0, 0.5, 1e-7, 0.3, 1e-9, 1e-12};
    CHECK(cone_edge(prof) == 4);
    CHECK(cone_edge(std::vector<double>(5, 0.0)) == 0);
    CHECK_THROWS_AS(light_cone_profile(from_gap_family(1.0), kOne, times, 10), CriticalSymbolError);
}

TEST_CASE("linear fit") {
    std::vector<double> t, v, flat;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(i);
        v.push_back(3.0 * i);
        flat.push_back(2.0);
    }
    const auto f = fit_linear(t, v, {0.0, 20.0});
    CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(f.intercept) < 1e-12);
    CHECK(f.r_squared == doctest::Approx(1.0));
    const auto g = fit_linear(t, flat, {0.0, 20.0});
    CHECK(std::abs(g.slope) < 1e-15);
    CHECK(g.r_squared == 1.0);
    CHECK_THROWS_AS(fit_linear(t, v, {0.0, 5.0}), DomainError);
    std::vector<double> same(12, 1.0), vals(12, 0.0);
    CHECK_THROWS_AS(fit_linear(same, vals, {0.0, 2.0}), DomainError);
}

TEST_CASE("short-time quadratic fit") {
    std::vector<double> t, v, flat;
    for (int i = 0; i <= 10; ++i) {
        const double ti = 0.01 * i;
        t.push_back(ti);
        v.push_back(1.0 + 2.0 * ti * ti);
        flat.push_back(0.5);
    }
    const auto f = fit_quadratic_short_time(t, v, 0.1);
    CHECK(f.kappa1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.kappa2 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-6));
    const auto s = fit_quadratic_short_time(t, flat, 0.1);
    CHECK(s.kappa2 == 0.0);
    CHECK(std::isnan(s.exponent));
    CHECK_THROWS_AS(fit_quadratic_short_time(t, v, 0.015), DomainError);
}

TEST_CASE("short-time growth of the Szegő sum") {
    // Constant β: ln Λ⁻¹(θ,0) ≡ 0, so the first non-zero term is t⁴.
    // A coupled β carries a t² term.
    const std::vector<double> ts{0.0125, 0.025, 0.05, 0.1};
    std::vector<double> flat_beta, coupled_beta;
    const TrigPolynomial beta({1.2, -0.3});
    const double base = szego_bounds(kGap, beta, 0.0).szego.value;
    for (double t : ts) {
        flat_beta.push_back(szego_bounds(kGap, kOne, t).szego.value);
        coupled_beta.push_back(szego_bounds(kGap, beta, t).szego.value - base);
    }
    CHECK(loglog_slope(ts, flat_beta) == doctest::Approx(4.0).epsilon(0.01));
    CHECK(loglog_slope(ts, coupled_beta) == doctest::Approx(2.0).epsilon(0.05));
}
