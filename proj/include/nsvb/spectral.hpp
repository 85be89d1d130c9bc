/// @file spectral.hpp
/// @brief Fourier machinery on the periodic torus: cached FFTW transforms on
///        n^d grids and the truncated Galerkin basis X_K.
///
/// Grid samples are flattened row-major with axis 0 slowest, matching the
/// spatial ordering of PhaseGrid. `coefficients` returns ghat(k) with
/// g(x) = sum_k ghat(k) e^{i kappa.x}, kappa = 2 pi k / L.
#pragma once

#include "nsvb/core.hpp"

#include <array>
#include <complex>
#include <vector>

namespace nsvb::spectral {

using cplx = std::complex<double>;

/// Signed wavenumber stored at FFT index i of an n-point axis.
inline int wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }
inline int fft_slot(int k, int n) { return k >= 0 ? k : k + n; }

/// Unnormalized transforms with exponent sign -1 (forward) and +1 (backward).
void fft_forward(int dim, int n, std::span<const cplx> in, std::span<cplx> out);
void fft_backward(int dim, int n, std::span<const cplx> in, std::span<cplx> out);

std::vector<cplx> coefficients(int dim, int n, std::span<const double> samples);
std::vector<double> samples(int dim, int n, std::span<const cplx> coeffs);

/// Zeroes the Nyquist planes so the coefficients describe a real trigonometric
/// polynomial of degree below n/2 in every axis.
void drop_nyquist(int dim, int n, std::span<cplx> coeffs);

/// Moves a spectrum between grid sizes (zero padding or truncation). Modes
/// that are Nyquist on either grid are dropped.
std::vector<cplx> resize(int dim, int n_from, std::span<const cplx> coeffs, int n_to);

/// Smallest even grid size on which products of a degree n_x/2 field with two
/// degree K fields project onto X_K without aliasing, and at least 3/2 n_x.
int padded_size(int n_x, int K);

/// Truncated Fourier basis e_k = exp(i kappa.x) / sqrt(|Omega|), |k_a| <= K.
class Basis {
public:
    Basis() = default;
    Basis(int dim, int K, double length, int n_x);

    int dim() const { return dim_; }
    int cutoff() const { return K_; }
    double length() const { return length_; }
    int n_x() const { return n_x_; }
    int n_pad() const { return n_pad_; }
    std::size_t size() const { return modes_.size(); }
    const std::array<int, 3>& mode(std::size_t m) const { return modes_[m]; }
    std::array<double, 3> kappa(std::size_t m) const;
    double kappa2(std::size_t m) const;
    /// Index of -k.
    std::size_t mirror(std::size_t m) const { return modes_.size() - 1 - m; }
    /// Flattened slot of mode m in an n^d FFT array.
    std::size_t slot(std::size_t m, int n) const;
    double volume() const;
    double norm() const { return std::sqrt(volume()); }

    /// <g, e_l> for samples g on the n grid, by the discrete transform.
    std::vector<cplx> project(std::span<const double> g, int n) const;
    /// Same, from a precomputed spectrum ghat on the n grid.
    std::vector<cplx> project_spectrum(std::span<const cplx> ghat, int n) const;
    /// Places basis coefficients into an n-grid spectrum (ghat convention).
    std::vector<cplx> to_spectrum(std::span<const cplx> c, int n) const;
    /// Real samples of sum_k c_k e_k on the n grid.
    std::vector<double> synthesize(std::span<const cplx> c, int n) const;

private:
    int dim_ = 1;
    int K_ = 0;
    double length_ = 2.0 * kPi;
    int n_x_ = 0;
    int n_pad_ = 0;
    std::vector<std::array<int, 3>> modes_;
};

}  // namespace nsvb::spectral
