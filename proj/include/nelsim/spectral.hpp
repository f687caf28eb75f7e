#ifndef NELSIM_SPECTRAL_HPP
#define NELSIM_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "nelsim/grid.hpp"

namespace nelsim {

/// Fourier-space machinery for one transform size. Plans are created once
/// and reused; exact for band-limited data on the periodic grid.
/// Not safe for concurrent use of a single instance; use one per thread
/// (the free functions below do this automatically).
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(std::size_t n);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  std::size_t size() const { return n_; }

  /// In-place unnormalized forward DFT.
  void forward(std::complex<double>* data) const;
  /// In-place inverse DFT, scaled by 1/n (round trip is the identity).
  void inverse(std::complex<double>* data) const;

  /// Signed integer frequency for bin j: 0..n/2-1, -n/2..-1.
  /// The wavenumber is k_j = 2*pi*freq(j) / L.
  long long freq(std::size_t j) const {
    return j < n_ / 2 ? static_cast<long long>(j)
                      : static_cast<long long>(j) - static_cast<long long>(n_);
  }

  /// Spectral d/dx of a real array (the Nyquist mode is dropped, which is the
  /// convention that keeps the derivative of real data real).
  std::vector<double> gradient(const std::vector<double>& f, const Grid& grid) const;
  /// Spectral d2/dx2 of a real array.
  std::vector<double> laplacian(const std::vector<double>& f, const Grid& grid) const;
  /// Spectral d/dx of a complex array.
  std::vector<std::complex<double>> gradient(const std::vector<std::complex<double>>& f,
                                             const Grid& grid) const;

 private:
  std::size_t n_;
  void* plan_fwd_;  // fftw_plan, kept opaque here
  void* plan_bwd_;
  mutable std::vector<std::complex<double>> scratch_;
};

/// Thread-local cached workspace for this grid size.
SpectralWorkspace& workspace_for(const Grid& grid);

/// Spectral derivative of f on the periodic grid; exact for band-limited f.
std::vector<double> gradient(const std::vector<double>& f, const Grid& grid);
std::vector<double> laplacian(const std::vector<double>& f, const Grid& grid);

}  // namespace nelsim

#endif
