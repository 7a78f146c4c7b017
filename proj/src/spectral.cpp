#include "qdk/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "qdk/error.hpp"

namespace qdk::spectral {

namespace {

// Signed frequency of FFT slot k.
long frequency(std::size_t k, std::size_t N)
{
    return k < (N + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(N);
}

} // namespace

std::vector<cplx> fourier_coefficients(std::span<const cplx> samples)
{
    const std::size_t N = samples.size();
    if (N == 0)
        throw UsageError("fourier_coefficients: empty sample set");
    Eigen::FFT<double> fft;
    std::vector<cplx> in(samples.begin(), samples.end());
    std::vector<cplx> out;
    fft.fwd(out, in);
    for (auto& c : out)
        c /= static_cast<double>(N);
    return out;
}

std::vector<cplx> from_fourier(std::span<const cplx> coeffs)
{
    const std::size_t N = coeffs.size();
    Eigen::FFT<double> fft;
    std::vector<cplx> in(coeffs.begin(), coeffs.end());
    for (auto& c : in)
        c *= static_cast<double>(N);
    std::vector<cplx> out;
    fft.inv(out, in);
    return out;
}

std::vector<cplx> derivative(std::span<const cplx> samples, int order)
{
    if (order < 0)
        throw UsageError("spectral::derivative: negative order");
    if (order == 0)
        return {samples.begin(), samples.end()};
    const std::size_t N = samples.size();
    auto c = fourier_coefficients(samples);
    for (std::size_t k = 0; k < N; ++k) {
        if (N % 2 == 0 && k == N / 2) {
            if (order % 2 == 1)
                c[k] = 0.0;
            else
                c[k] *= std::pow(-1.0, order / 2) * std::pow(static_cast<double>(N / 2), order);
            continue;
        }
        const double m = static_cast<double>(frequency(k, N));
        c[k] *= std::pow(cplx(0.0, m), order);
    }
    return from_fourier(c);
}

std::vector<cplx> resample(std::span<const cplx> samples, std::size_t M)
{
    const std::size_t N = samples.size();
    if (M == N)
        return {samples.begin(), samples.end()};
    auto c = fourier_coefficients(samples);
    std::vector<cplx> d(M, 0.0);
    const long half = static_cast<long>(std::min(N, M) / 2);
    for (std::size_t k = 0; k < N; ++k) {
        const long m = frequency(k, N);
        if (m > -half && m < half) {
            d[static_cast<std::size_t>((m + static_cast<long>(M)) % static_cast<long>(M))] = c[k];
        } else if (std::abs(m) == half) {
            // split the band-edge mode symmetrically so real data stays real
            const long mm = m;
            d[static_cast<std::size_t>((mm + static_cast<long>(M)) % static_cast<long>(M))] += 0.5 * c[k];
            d[static_cast<std::size_t>((-mm + static_cast<long>(M)) % static_cast<long>(M))] += 0.5 * c[k];
        }
    }
    return from_fourier(d);
}

std::vector<cplx> centered_coefficients(std::span<const cplx> samples, double rel_tol)
{
    const std::size_t N = samples.size();
    auto c = fourier_coefficients(samples);
    double cmax = 0.0;
    for (auto v : c)
        cmax = std::max(cmax, std::abs(v));
    long K = 0;
    for (std::size_t k = 0; k < N; ++k) {
        const long m = frequency(k, N);
        if (std::abs(c[k]) > rel_tol * cmax)
            K = std::max(K, std::abs(m));
    }
    K = std::min<long>(K, static_cast<long>(N) / 2 - 1);
    std::vector<cplx> out(static_cast<std::size_t>(2 * K + 1), 0.0);
    for (long m = -K; m <= K; ++m)
        out[static_cast<std::size_t>(m + K)] = c[static_cast<std::size_t>((m + static_cast<long>(N)) % static_cast<long>(N))];
    return out;
}

} // namespace qdk::spectral
