#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qe {

struct FourierCoefficients {
    std::vector<double> re;  // k = 0..kmax
    double max_imag = 0.0;   // largest |Im| among returned coefficients
};

/// (1/Q) Σ_j f_j e^{−2πijk/Q} for k = 0..kmax, from real samples f_j = f(2πj/Q).
/// This is the trapezoidal rule for (1/2π)∫ f(θ) e^{−ikθ} dθ. The first
/// sample is subtracted before transforming, so a constant input yields
/// exactly zero for every k ≥ 1. Requires kmax ≤ Q/2.
FourierCoefficients fourier_coefficients(std::span<const double> samples, std::size_t kmax);

/// Smallest power of two ≥ n.
std::size_t next_pow2(std::size_t n);

}  // namespace qe
