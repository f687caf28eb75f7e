#ifndef NELSIM_DRIFT_HPP
#define NELSIM_DRIFT_HPP

#include <cstdint>
#include <vector>

#include "nelsim/wavefield.hpp"

namespace nelsim {

/// Velocity fields of the diffusion attached to a state:
///   current  v = grad(S)/m
///   osmotic  u = (sigma/2) grad(log rho)
///   forward drift b = v + u
/// (the backward drift is v - u). Values on masked points are 0; elsewhere
/// |v| and |u| are capped at the clamp passed to drift_fields, with the
/// number of capped entries counted.
struct VelocityFields {
  Grid grid;
  std::vector<double> v;
  std::vector<double> u;
  std::vector<double> b;
  std::vector<std::uint8_t> valid;
  std::uint64_t clamp_events = 0;

  /// Forward drift linearly interpolated to an arbitrary position
  /// (periodic across the domain seam).
  double drift_at(double pos) const;
};

/// Default cap: 100 domain lengths per unit time.
double default_drift_clamp(const Grid& grid);

/// Both gradients are evaluated through the complex logarithmic derivative
/// grad(psi)/psi, whose real part is grad(log rho)/2 and imaginary part
/// grad(S)/hbar; psi itself is smooth, so one spectral derivative serves and
/// masked tail regions cannot contaminate interior points.
VelocityFields drift_fields(const WaveField& psi, const PhysicalParams& params,
                            double clamp);

std::vector<double> backward_drift(const VelocityFields& fields);

}  // namespace nelsim

#endif
