#include "qe/cli/commands.hpp"

#include "qe/errors.hpp"
#include "qe/evolution.hpp"
#include "qe/reduction.hpp"
#include "qe/szego.hpp"
#include "qe/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

namespace qe::cli {

namespace {

using nlohmann::json;

// Random cosine polynomial with min ≥ floor (a0 dominates Σ|a_m|).
TrigPolynomial random_symbol(std::mt19937_64& rng, int max_degree, double floor = 0.2) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), lift(floor, floor + 1.3);
    const int d = deg(rng);
    std::vector<double> a(static_cast<std::size_t>(d) + 1, 0.0);
    double s = 0.0;
    for (int m = 1; m <= d; ++m) {
        a[static_cast<std::size_t>(m)] = coef(rng);
        s += std::abs(a[static_cast<std::size_t>(m)]);
    }
    a[0] = s + lift(rng);
    return TrigPolynomial(std::move(a));
}

json instance(const TrigPolynomial& lam, const TrigPolynomial& beta, std::size_t N, double t, std::size_t n = 0) {
    json j{{"lambda", format_spectral_spec(lam)}, {"beta", format_spectral_spec(beta)}, {"N", N}, {"t", t}};
    if (n) j["n"] = n;
    return j;
}

class Suite {
public:
    explicit Suite(std::string name) : name_(std::move(name)) {}

    // Runs one check; exceptions count as failures.
    void check(const std::function<bool(std::string&)>& fn, const json& config) {
        ++checks_;
        std::string msg;
        bool ok = false;
        try {
            ok = fn(msg);
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        if (!ok) failures_.push_back({{"message", msg}, {"config", config}});
    }

    bool passed() const { return failures_.empty(); }

    json report(double seconds) const {
        return {{"name", name_}, {"checks", checks_}, {"passed", passed()}, {"failures", failures_},
                {"seconds", seconds}};
    }

private:
    std::string name_;
    std::size_t checks_ = 0;
    json failures_ = json::array();
};

std::string fmt(const char* what, double v, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.3e exceeds %.1e", what, v, tol);
    return buf;
}

double max_mode_dev(const GaussianPureState& a, const GaussianPureState& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a.mode_symbols()[j] - b.mode_symbols()[j]));
    return d;
}

struct Plan {
    int instances;
    std::size_t N;
};

void spectral_suite(Suite& s, std::mt19937_64& rng, const Plan& p) {
    for (int i = 0; i < p.instances; ++i) {
        const auto f = random_symbol(rng, 5);
        const std::size_t N = 2 * f.degree() + 1 + static_cast<std::size_t>(i % 17);
        const json cfg = instance(f, TrigPolynomial::constant(1.0), N, 0.0);
        s.check(
            [&](std::string& m) {
                const auto eig = build_circulant(f, N).fourier_eigenvalues();
                double d = 0.0;
                for (std::size_t j = 0; j < N; ++j) {
                    d = std::max(d, std::abs(eig[j] - f(2.0 * std::numbers::pi * static_cast<double>(j) /
                                                        static_cast<double>(N))));
                }
                m = fmt("circulant eigenvalue error", d, 1e-12);
                return d < 1e-12;
            },
            cfg);
        s.check(
            [&](std::string& m) {
                const auto e = extrema(f);
                double lo = e.min, hi = e.max, dmax = 0.0;
                for (int j = 0; j < 200000; ++j) {
                    const double th = 2.0 * std::numbers::pi * j / 200000.0;
                    const double v = f(th);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                    dmax = std::max(dmax, std::abs(f.derivative(th)));
                }
                const bool ok = lo >= e.min - 1e-15 && hi <= e.max + 1e-15 &&
                                dmax <= static_cast<double>(f.degree()) * hi + 1e-12;
                m = "extrema beaten by scan or Bernstein bound violated";
                return ok;
            },
            cfg);
    }
}

void evolution_suite(Suite& s, std::mt19937_64& rng, const Plan& p) {
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    for (int i = 0; i < p.instances; ++i) {
        const EvolutionSetup setup{random_symbol(rng, 3), random_symbol(rng, 3), p.N};
        const double t = ut(rng);
        const json cfg = instance(setup.lambda, setup.beta, p.N, t);
        s.check(
            [&](std::string& m) {
                const double d = max_mode_dev(evolve(setup, t), riccati_oracle(setup, t));
                m = fmt("closed form vs Riccati", d, 1e-6);
                return d < 1e-6;
            },
            cfg);
        s.check(
            [&](std::string& m) {
                const auto st = evolve(setup, t);
                double d = 0.0;
                for (std::size_t j = 0; j < p.N; ++j) {
                    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p.N);
                    const double lt = lambda_of_t(setup.lambda, setup.beta, th, t);
                    d = std::max(d, std::abs(st.mode_symbols()[j].real() - lt) / lt);
                }
                m = fmt("Re a vs Λ relative", d, 1e-12);
                return d < 1e-12;
            },
            cfg);
    }
}

void reduction_suite(Suite& s, std::mt19937_64& rng, const Plan& p) {
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    for (int i = 0; i < p.instances; ++i) {
        const EvolutionSetup setup{random_symbol(rng, 3), random_symbol(rng, 3), p.N};
        const double t = ut(rng);
        const std::size_t n = 1 + static_cast<std::size_t>(i) % (p.N - 1);
        const json cfg = instance(setup.lambda, setup.beta, p.N, t, n);
        s.check(
            [&](std::string& m) {
                const auto st = evolve(setup, t);
                const auto rec = entropy_record(st, n);  // chain and Schur residual
                const auto b = partition(densify(st), n);
                const auto pt = purity_terms(b);
                const double d = std::abs(pt.two_determinant - pt.z_form);
                m = fmt("purity route difference", d, 1e-9);
                return d < 1e-9 && rec.exact_entropy >= rec.neg_log_purity - 1e-8 &&
                       rec.neg_log_purity >= rec.det_bound - 1e-8;
            },
            cfg);
        s.check(
            [&](std::string& m) {
                const auto A = densify(evolve(setup, t));
                std::vector<std::size_t> kept(p.N - n);
                for (std::size_t k = 0; k < kept.size(); ++k) kept[k] = (n + k + 3) % p.N;
                const double d = std::abs(exact_entropy(A, kept) - exact_entropy(A, n));
                const double sym = std::abs(exact_entropy(A, n) - exact_entropy(A, p.N - n));
                m = fmt("translation/complement asymmetry", std::max(d, sym), 1e-8);
                return d < 1e-8 && sym < 1e-8;
            },
            cfg);
    }
}

void szego_suite(Suite& s, std::mt19937_64& rng, const Plan& p) {
    std::uniform_real_distribution<double> ut(0.5, 6.0);
    for (int i = 0; i < p.instances; ++i) {
        const auto lam = random_symbol(rng, 2);
        const auto beta = random_symbol(rng, 2);
        const double t = ut(rng);
        const json cfg = instance(lam, beta, 0, t);
        s.check(
            [&](std::string& m) {
                const auto fs = szego_bounds(lam, beta, t);
                m = "bound order 0 <= bk <= szego violated";
                return fs.bk_bound >= 0.0 && fs.bk_bound <= fs.szego.value + 1e-9 && fs.szego.tail_ok;
            },
            cfg);
        s.check(
            [&](std::string& m) {
                const auto ms = mu_sigma(lam, beta, t, 64);
                m = fmt("ς + μ − b residual", ms.recombination_residual, 1e-10);
                return ms.recombination_residual < 1e-10;
            },
            cfg);
    }
    const auto gap = from_gap_family(1.5);
    const auto one = TrigPolynomial::constant(1.0);
    for (double t : {1.0, 3.0}) {
        s.check(
            [&](std::string& m) {
                const double direct = szego_bounds(gap, one, t).szego.value;
                const double pars = parseval_check(gap, one, t, 1024);
                const double rel = std::abs(pars - direct) / direct;
                m = fmt("Parseval relative difference", rel, 1e-4);
                return rel < 1e-4;
            },
            instance(gap, one, 0, t));
    }
    s.check(
        [&](std::string& m) {
            const auto root = TrigPolynomial({1.5, -1.0});
            const double a = szego_bounds(gap, root, 0.0).szego.value;
            const double b = szego_bounds(gap, root, 7.0).szego.value;
            m = fmt("stationary drift", std::abs(a - b), 1e-8);
            return std::abs(a - b) < 1e-8;
        },
        instance(gap, TrigPolynomial({1.5, -1.0}), 0, 7.0));
    s.check(
        [&](std::string& m) {
            const std::vector<double> times{1.0, 2.0, 4.0};
            const auto cone = light_cone_profile(gap, one, times, 400);
            m = "μ_k edge beyond v_g t";
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (static_cast<double>(cone.edges[i]) > cone.group_velocity * times[i]) return false;
            }
            return true;
        },
        instance(gap, one, 0, 4.0));
}

void mutation_suite(Suite& s) {
    const EvolutionSetup setup{from_gap_family(1.5), TrigPolynomial::constant(1.0), 16};
    s.check(
        [&](std::string& m) {
            const auto b = partition(densify(evolve(setup, 2.0)), 8);
            auto r = reduce(b);
            // Flip the sign of the CᵀT⁻¹C term in Γ.
            r.Gamma = b.R - r.Gamma;
            m = "sign error in Γ not detected by the purity dual formula";
            try {
                return std::abs(log_purity_two_determinant(r, b.Pt) - log_purity_z_form(b)) > 1e-6;
            } catch (const DomainError&) {
                return true;
            }
        },
        instance(setup.lambda, setup.beta, 16, 2.0, 8));
}

}  // namespace

int cmd_verify(VerifyLevel level, std::uint64_t seed, std::ostream& report, std::ostream& log) {
    const bool full = level == VerifyLevel::full;
    const Plan dense{full ? 60 : 12, full ? std::size_t{32} : std::size_t{24}};
    const Plan light{full ? 40 : 8, 0};
    std::mt19937_64 rng(seed);

    json suites = json::array();
    bool all = true;
    auto run = [&](const char* name, const std::function<void(Suite&)>& body) {
        const auto start = std::chrono::steady_clock::now();
        Suite s(name);
        body(s);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        suites.push_back(s.report(secs));
        all = all && s.passed();
        log << (s.passed() ? "PASS " : "FAIL ") << name << '\n';
    };
    run("spectral", [&](Suite& s) { spectral_suite(s, rng, light); });
    run("evolution", [&](Suite& s) { evolution_suite(s, rng, dense); });
    run("reduction", [&](Suite& s) { reduction_suite(s, rng, dense); });
    run("szego", [&](Suite& s) { szego_suite(s, rng, light); });
    run("mutation", [&](Suite& s) { mutation_suite(s); });

    const json out{{"version", kVersion},
                   {"level", full ? "full" : "quick"},
                   {"seed", seed},
                   {"passed", all},
                   {"suites", suites}};
    report << out.dump(2) << '\n';
    return all ? kSuccess : kVerificationFailure;
}

}  // namespace qe::cli
