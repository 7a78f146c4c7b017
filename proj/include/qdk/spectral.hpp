#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qdk {

using cplx = std::complex<double>;

namespace spectral {

// Periodic samples f(2*pi*k/N), k = 0..N-1, throughout.

/// Fourier coefficients c_m, m = -N/2..N/2-1, stored in FFT order (m mod N).
std::vector<cplx> fourier_coefficients(std::span<const cplx> samples);

/// Inverse of fourier_coefficients.
std::vector<cplx> from_fourier(std::span<const cplx> coeffs);

/// d^order/dt^order of the trigonometric interpolant; the Nyquist mode is dropped
/// for odd orders.
std::vector<cplx> derivative(std::span<const cplx> samples, int order = 1);

/// Trigonometric interpolant resampled at M equispaced points.
std::vector<cplx> resample(std::span<const cplx> samples, std::size_t M);

/// Centered coefficients c_{-K..K} of a band-limited fit to the samples, with K the
/// smallest band that keeps every |c_m| above rel_tol * max|c|.
std::vector<cplx> centered_coefficients(std::span<const cplx> samples, double rel_tol);

} // namespace spectral
} // namespace qdk
