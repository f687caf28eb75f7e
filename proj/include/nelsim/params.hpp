#ifndef NELSIM_PARAMS_HPP
#define NELSIM_PARAMS_HPP

#include <stdexcept>

#include "nelsim/potential.hpp"

namespace nelsim {

/// Physical constants of a run. Default unit system hbar = m = 1 (so the
/// diffusion coefficient sigma = hbar/m is 1). lambda in [0,1] interpolates
/// the dynamics between the standard linear equation (0) and its classical
/// nonlinear counterpart (1).
struct PhysicalParams {
  double mass = 1.0;
  double hbar = 1.0;
  double lambda = 0.0;
  PotentialSpec potential = PotentialSpec::free_particle();

  /// Diffusion coefficient per unit mass, sigma = hbar/m by definition.
  double sigma() const { return hbar / mass; }

  void validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("PhysicalParams: mass must be > 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("PhysicalParams: hbar must be > 0");
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("PhysicalParams: lambda must lie in [0, 1]");
  }
};

}  // namespace nelsim

#endif
