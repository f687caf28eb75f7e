#ifndef NELSIM_WAVEFIELD_HPP
#define NELSIM_WAVEFIELD_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "nelsim/grid.hpp"
#include "nelsim/params.hpp"

namespace nelsim {

/// Complex amplitude sampled on the grid, normalized so that
/// sum |psi_j|^2 dx = 1. Treat as immutable; operations return new values.
struct WaveField {
  Grid grid;
  std::vector<std::complex<double>> amplitude;

  WaveField() = default;
  /// Normalizes the raw samples; throws on size mismatch, non-finite input,
  /// or an identically zero state.
  WaveField(const Grid& g, std::vector<std::complex<double>> raw);

  double norm() const;  // discrete L2 norm, 1 after construction
  std::vector<double> density() const;
};

/// Polar decomposition psi = sqrt(rho) exp(i S / hbar). rho keeps the full
/// |psi|^2 everywhere; the action S is unwrapped along the grid and set to 0
/// at points where rho < rho_floor (valid[j] == 0), since the phase carries
/// no information there. Unwrapping continuity restarts after each such gap.
struct PolarFields {
  Grid grid;
  std::vector<double> rho;
  std::vector<double> action;
  std::vector<std::uint8_t> valid;

  std::size_t masked_count() const;
};

/// Default node threshold: 1e-12 times the uniform density on this grid.
double default_rho_floor(const Grid& grid);

PolarFields polar_decompose(const WaveField& psi, double rho_floor, double hbar);
inline PolarFields polar_decompose(const WaveField& psi, double rho_floor) {
  return polar_decompose(psi, rho_floor, 1.0);
}

/// Reassemble a WaveField from polar fields (masked points keep phase 0).
WaveField polar_compose(const PolarFields& fields, double hbar);
inline WaveField polar_compose(const PolarFields& fields) {
  return polar_compose(fields, 1.0);
}

double mean_position(const WaveField& psi);
/// Standard deviation of |psi|^2 about its mean.
double position_width(const WaveField& psi);
/// Momentum expectation from the Fourier spectrum.
double mean_momentum(const WaveField& psi, double hbar);

}  // namespace nelsim

#endif
