#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ggbm::detail {

/// In-place iterative radix-2 complex FFT with kernel e^{-2 pi i jk / M}.
/// Length must be a power of two. The inverse transform is the conjugate
/// trick (conjugate, transform, conjugate, divide by M), applied by callers
/// that need it.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t m = a.size();
    if (m == 0 || (m & (m - 1)) != 0)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    constexpr double kTwoPi = 6.283185307179586476925287;
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> step(std::cos(ang), std::sin(ang));
        for (std::size_t base = 0; base < m; base += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[base + k];
                const std::complex<double> t = w * a[base + k + len / 2];
                a[base + k] = u + t;
                a[base + k + len / 2] = u - t;
                w *= step;
            }
        }
    }
}

} // namespace ggbm::detail
