#include "qe/spectral.hpp"

#include "qe/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace qe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

double parse_double(std::string_view token, std::string_view spec) {
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw ConfigError("invalid number '" + std::string(token) + "' in spectral spec '" + std::string(spec) + "'");
    }
    return value;
}

// Bisection on f' inside [a, b]; `want_min` selects the sign pattern (−,+) or (+,−).
double refine_stationary(const TrigPolynomial& f, double a, double b, bool want_min) {
    double da = f.derivative(a);
    double db = f.derivative(b);
    const double sa = want_min ? -1.0 : 1.0;
    if (da * sa < 0.0 || db * sa > 0.0) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        const double mid = 0.5 * (a + b);
        const double dm = f.derivative(mid);
        if (dm == 0.0) return mid;
        if ((dm * sa) > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TrigPolynomial::TrigPolynomial(std::vector<double> cosine_coeffs) : coeffs_(std::move(cosine_coeffs)) {
    if (coeffs_.empty()) throw DomainError("trigonometric polynomial needs at least a_0");
    for (double a : coeffs_) {
        if (!std::isfinite(a)) throw DomainError("trigonometric polynomial coefficient is not finite");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double TrigPolynomial::operator()(double theta) const {
    double sum = coeffs_[0];
    for (std::size_t m = 1; m < coeffs_.size(); ++m) sum += coeffs_[m] * std::cos(static_cast<double>(m) * theta);
    return sum;
}

double TrigPolynomial::derivative(double theta) const {
    double sum = 0.0;
    for (std::size_t m = 1; m < coeffs_.size(); ++m) {
        const double dm = static_cast<double>(m);
        sum -= dm * coeffs_[m] * std::sin(dm * theta);
    }
    return sum;
}

double TrigPolynomial::abs_sum() const noexcept {
    double s = 0.0;
    for (double a : coeffs_) s += std::abs(a);
    return s;
}

double eval(const TrigPolynomial& f, double theta) { return f(theta); }

TrigPolynomial from_gap_family(double c) {
    if (!std::isfinite(c)) throw DomainError("gap family parameter must be finite");
    return TrigPolynomial({c * c + 0.5, -2.0 * c, 0.5});
}

bool gap_family_is_critical(double c) { return std::abs(c) <= 1.0; }

TrigPolynomial parse_spectral_spec(std::string_view spec) {
    constexpr std::string_view poly = "poly:";
    constexpr std::string_view gap = "gap:c=";
    if (spec.starts_with(poly)) {
        std::string_view body = spec.substr(poly.size());
        std::vector<double> coeffs;
        while (true) {
            const auto comma = body.find(',');
            coeffs.push_back(parse_double(body.substr(0, comma), spec));
            if (comma == std::string_view::npos) break;
            body.remove_prefix(comma + 1);
        }
        return TrigPolynomial(std::move(coeffs));
    }
    if (spec.starts_with(gap)) {
        return from_gap_family(parse_double(spec.substr(gap.size()), spec));
    }
    throw ConfigError("spectral spec must be 'poly:a0,a1,...' or 'gap:c=<value>', got '" + std::string(spec) + "'");
}

std::string format_spectral_spec(const TrigPolynomial& f) {
    std::string out = "poly:";
    char buf[32];
    for (std::size_t m = 0; m < f.coeffs().size(); ++m) {
        std::snprintf(buf, sizeof buf, "%.17g", f.coeffs()[m]);
        if (m) out += ',';
        out += buf;
    }
    return out;
}

CirculantMatrix::CirculantMatrix(std::vector<double> first_row) : first_row_(std::move(first_row)) {
    const std::size_t n = first_row_.size();
    if (n == 0) throw DomainError("circulant matrix must be non-empty");
    double scale = 0.0;
    for (double v : first_row_) scale = std::max(scale, std::abs(v));
    for (std::size_t d = 1; d < n; ++d) {
        if (std::abs(first_row_[d] - first_row_[n - d]) > 1e-12 * std::max(scale, 1.0)) {
            throw DomainError("circulant first row is not symmetric (offset d vs N−d)");
        }
    }
}

double CirculantMatrix::operator()(std::size_t row, std::size_t col) const {
    const std::size_t n = size();
    return first_row_[(col + n - row % n) % n];
}

std::vector<double> CirculantMatrix::fourier_eigenvalues() const {
    const std::size_t n = size();
    std::vector<double> twiddle(n);
    for (std::size_t q = 0; q < n; ++q) twiddle[q] = std::cos(kTwoPi * static_cast<double>(q) / static_cast<double>(n));
    std::vector<double> eig(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < n; ++d) s += first_row_[d] * twiddle[(j * d) % n];
        eig[j] = s;
    }
    return eig;
}

CirculantMatrix build_circulant(const TrigPolynomial& f, std::size_t n) {
    const std::size_t k = f.degree();
    if (n <= 2 * k) {
        throw DomainError("circulant size N=" + std::to_string(n) + " must exceed 2K=" + std::to_string(2 * k));
    }
    std::vector<double> row(n, 0.0);
    row[0] = f.coeffs()[0];
    for (std::size_t m = 1; m <= k; ++m) {
        row[m] += 0.5 * f.coeffs()[m];
        row[n - m] += 0.5 * f.coeffs()[m];
    }
    return CirculantMatrix(std::move(row));
}

Extrema extrema(const TrigPolynomial& f, std::size_t grid_size) {
    if (grid_size < std::max<std::size_t>(4, 4 * f.degree())) {
        throw DomainError("extrema grid must have at least max(4, 4K) points");
    }
    const double h = kTwoPi / static_cast<double>(grid_size);
    std::vector<double> v(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) v[i] = f(h * static_cast<double>(i));

    const auto imin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    const auto imax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    Extrema out{v[imin], v[imax], h * static_cast<double>(imin), h * static_cast<double>(imax)};

    for (std::size_t i = 0; i < grid_size; ++i) {
        const double prev = v[(i + grid_size - 1) % grid_size];
        const double next = v[(i + 1) % grid_size];
        const double theta = h * static_cast<double>(i);
        if (v[i] <= prev && v[i] < next) {
            const double s = refine_stationary(f, theta - h, theta + h, true);
            if (!std::isnan(s) && f(s) < out.min) {
                out.min = f(s);
                out.argmin = wrap_angle(s);
            }
        }
        if (v[i] >= prev && v[i] > next) {
            const double s = refine_stationary(f, theta - h, theta + h, false);
            if (!std::isnan(s) && f(s) > out.max) {
                out.max = f(s);
                out.argmax = wrap_angle(s);
            }
        }
    }
    return out;
}

double criticality_tolerance(const TrigPolynomial& f) { return 1e-12 * f.abs_sum(); }

bool is_critical(const TrigPolynomial& f) { return extrema(f).min <= criticality_tolerance(f); }

void require_positive(const TrigPolynomial& f, std::string_view what, bool allow_zero) {
    const double lo = extrema(f).min;
    const double tol = criticality_tolerance(f);
    if (allow_zero ? lo < -tol : lo <= tol) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", lo);
        throw DomainError(std::string(what) + " must be " + (allow_zero ? "non-negative" : "strictly positive") +
                          " (min = " + buf + ")");
    }
}

double group_velocity_bound(const TrigPolynomial& lambda) {
    const Extrema e = extrema(lambda);
    if (e.min <= criticality_tolerance(lambda)) {
        throw CriticalSymbolError("light-cone velocity undefined for a critical symbol (min λ = 0)");
    }
    return static_cast<double>(lambda.degree()) * e.max / std::sqrt(e.min);
}

std::vector<double> sample(const TrigPolynomial& f, std::size_t n) {
    // Mirror the upper half so that samples at θ and 2π − θ are bit-identical.
    std::vector<double> out(n);
    for (std::size_t j = 0; j <= n / 2 && j < n; ++j) {
        out[j] = f(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
        if (j != 0) out[n - j] = out[j];
    }
    return out;
}

std::vector<double> sample_nonnegative(const TrigPolynomial& f, std::size_t n, double offset) {
    const double tol = criticality_tolerance(f);
    const bool half = offset == 0.5;
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (offset == 0.0 && j > n / 2) {
            out[j] = out[n - j];
            continue;
        }
        if (half && j >= (n + 1) / 2) {
            out[j] = out[n - 1 - j];
            continue;
        }
        double v = f(kTwoPi * (static_cast<double>(j) + offset) / static_cast<double>(n));
        if (v < 0.0) {
            if (v < -tol) throw DomainError("symbol is negative on the sampling grid");
            v = 0.0;
        }
        out[j] = v;
    }
    return out;
}

}  // namespace qe
