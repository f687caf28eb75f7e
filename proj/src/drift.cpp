#include "nelsim/drift.hpp"

#include <cmath>
#include <stdexcept>

#include "nelsim/spectral.hpp"

namespace nelsim {

double VelocityFields::drift_at(double pos) const {
  const double s = (grid.wrap(pos) - grid.x_min) / grid.dx;
  const auto j0 = static_cast<std::size_t>(s) % grid.n;
  const std::size_t j1 = (j0 + 1) % grid.n;
  const double frac = s - std::floor(s);
  return (1.0 - frac) * b[j0] + frac * b[j1];
}

double default_drift_clamp(const Grid& grid) { return 100.0 * grid.length(); }

VelocityFields drift_fields(const WaveField& psi, const PhysicalParams& params,
                            double clamp) {
  params.validate();
  if (!(clamp > 0.0)) throw std::invalid_argument("drift_fields: clamp must be > 0");
  const Grid& grid = psi.grid;

  VelocityFields out;
  out.grid = grid;
  out.v.assign(grid.n, 0.0);
  out.u.assign(grid.n, 0.0);
  out.b.assign(grid.n, 0.0);

  const auto pf = polar_decompose(psi, default_rho_floor(grid), params.hbar);
  out.valid = pf.valid;

  const auto dpsi = workspace_for(grid).gradient(psi.amplitude, grid);
  const double sigma = params.sigma();
  for (std::size_t j = 0; j < grid.n; ++j) {
    if (!out.valid[j]) continue;
    const std::complex<double> ratio = dpsi[j] / psi.amplitude[j];
    double v = params.hbar / params.mass * ratio.imag();
    double u = sigma * ratio.real();
    if (std::abs(v) > clamp) {
      v = std::copysign(clamp, v);
      ++out.clamp_events;
    }
    if (std::abs(u) > clamp) {
      u = std::copysign(clamp, u);
      ++out.clamp_events;
    }
    out.v[j] = v;
    out.u[j] = u;
    out.b[j] = v + u;
  }
  return out;
}

std::vector<double> backward_drift(const VelocityFields& fields) {
  std::vector<double> bs(fields.v.size());
  for (std::size_t j = 0; j < bs.size(); ++j) bs[j] = fields.v[j] - fields.u[j];
  return bs;
}

}  // namespace nelsim
