#pragma once

#include <Eigen/Dense>

#include <complex>

namespace emofuse::signal {

using Eigen::VectorXcd;

/// Radix-2 discrete Fourier transform, X[k] = sum_n x[n] e^{-2pi i k n / N}.
/// Length must be a power of two (ShapeError otherwise).
VectorXcd fft(const VectorXcd& x);

/// Inverse transform; fft then ifft returns the input within 1e-9.
VectorXcd ifft(const VectorXcd& x);

bool is_power_of_two(Eigen::Index n);

}  // namespace emofuse::signal
