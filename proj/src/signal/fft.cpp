#include "emofuse/signal/fft.hpp"

#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse::signal {

namespace {

// Iterative radix-2 Cooley-Tukey. Twiddles come from a fresh std::polar
// table per call; incremental twiddle recurrences would drift past the
// 1e-9 contract at N = 4096.
void transform(VectorXcd& v, bool inverse) {
    const Eigen::Index n = v.size();
    if (n <= 1) {
        return;
    }

    // Bit-reversal permutation.
    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(v(i), v(j));
        }
    }

    const double sign = inverse ? 1.0 : -1.0;
    VectorXcd twiddle(n / 2);
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        twiddle(k) = std::polar(1.0, sign * 2.0 * M_PI * k / n);
    }

    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        const Eigen::Index step = n / len;
        for (Eigen::Index start = 0; start < n; start += len) {
            for (Eigen::Index k = 0; k < len / 2; ++k) {
                const std::complex<double> w = twiddle(k * step);
                const std::complex<double> a = v(start + k);
                const std::complex<double> b = v(start + k + len / 2) * w;
                v(start + k) = a + b;
                v(start + k + len / 2) = a - b;
            }
        }
    }
}

void require_power_of_two(Eigen::Index n) {
    if (!is_power_of_two(n)) {
        throw ShapeError("fft: length " + std::to_string(n) +
                         " is not a power of two");
    }
}

}  // namespace

bool is_power_of_two(Eigen::Index n) {
    return n > 0 && (n & (n - 1)) == 0;
}

VectorXcd fft(const VectorXcd& x) {
    require_power_of_two(x.size());
    VectorXcd v = x;
    transform(v, /*inverse=*/false);
    return v;
}

VectorXcd ifft(const VectorXcd& x) {
    require_power_of_two(x.size());
    VectorXcd v = x;
    transform(v, /*inverse=*/true);
    v /= static_cast<double>(v.size());
    return v;
}

}  // namespace emofuse::signal
