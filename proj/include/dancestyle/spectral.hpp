#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace dancestyle {

using Spectrum = std::vector<std::complex<double>>;

namespace spectral_detail {

inline void require_finite(std::span<const double> signal) {
    for (std::size_t i = 0; i < signal.size(); ++i)
        if (!std::isfinite(signal[i]))
            throw DataError("spectral: non-finite input at index " + std::to_string(i));
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// exp(-2*pi*i * num / den), with num reduced modulo den first so large
// products k*t keep full precision.
inline std::complex<double> unit_root(std::uint64_t num, std::uint64_t den) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

/// In-place iterative radix-2 transform; `inverse` flips the twiddle sign (no scaling).
inline void radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::complex<double>> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        twiddle[k] = unit_root(k, n);
        if (inverse) twiddle[k] = std::conj(twiddle[k]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + half] * twiddle[k * step];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

/// Bluestein chirp-z: exact length-n DFT via a power-of-two circular convolution.
inline Spectrum bluestein(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    // chirp[k] = exp(-i*pi*k^2/n) = unit_root(k^2, 2n)
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = static_cast<std::uint64_t>(k) * k % (2 * n);
        chirp[k] = unit_root(k2, 2 * n);
    }
    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    radix2(a, false);
    radix2(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    radix2(a, true);

    Spectrum out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    return out;
}

}  // namespace spectral_detail

/// Exact-length DFT, X_k = sum_t x_t exp(-2 pi i k t / T).
/// Radix-2 when T is a power of two, Bluestein otherwise.
inline Spectrum fft(std::span<const double> signal) {
    if (signal.empty()) throw DataError("spectral: empty signal");
    spectral_detail::require_finite(signal);
    if (spectral_detail::is_power_of_two(signal.size())) {
        std::vector<std::complex<double>> a(signal.begin(), signal.end());
        spectral_detail::radix2(a, false);
        return a;
    }
    return spectral_detail::bluestein(signal);
}

/// Direct O(T^2) DFT with the same sign convention as fft(); reference oracle.
inline Spectrum dft_naive(std::span<const double> signal) {
    spectral_detail::require_finite(signal);
    const std::size_t n = signal.size();
    Spectrum out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t)
            sum += signal[t] * spectral_detail::unit_root(static_cast<std::uint64_t>(k) * t, n);
        out[k] = sum;
    }
    return out;
}

inline std::vector<double> magnitudes(const Spectrum& spectrum) {
    std::vector<double> out(spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) out[k] = std::abs(spectrum[k]);
    return out;
}

}  // namespace dancestyle
