#include "nelsim/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nelsim/errors.hpp"
#include "nelsim/spectral.hpp"

namespace nelsim {

namespace {

constexpr double kNormDriftLimit = 1e-9;

// exp(-i (V - lambda Q) dt / (2 hbar)) applied in place.
void half_kick(std::vector<std::complex<double>>& amp, const std::vector<double>& veff,
               double dt, double hbar) {
  const double scale = -0.5 * dt / hbar;
  for (std::size_t j = 0; j < amp.size(); ++j)
    amp[j] *= std::polar(1.0, scale * veff[j]);
}

std::vector<double> effective_potential(const WaveField& psi,
                                        const std::vector<double>& v_grid,
                                        const PhysicalParams& params,
                                        std::size_t* masked_out) {
  if (params.lambda == 0.0) {
    if (masked_out) *masked_out = 0;
    return v_grid;
  }
  const auto pf = polar_decompose(psi, default_rho_floor(psi.grid), params.hbar);
  if (masked_out) *masked_out = pf.masked_count();
  const auto q = quantum_potential(pf, params);
  std::vector<double> veff(v_grid.size());
  for (std::size_t j = 0; j < veff.size(); ++j)
    veff[j] = v_grid[j] - params.lambda * q[j];
  return veff;
}

WaveField step_impl(const WaveField& psi, const std::vector<double>& v_grid,
                    const PhysicalParams& params, double dt, double* norm_drift,
                    std::size_t* masked_out) {
  const Grid& grid = psi.grid;
  const auto& ws = workspace_for(grid);

  std::size_t masked_a = 0, masked_b = 0;
  std::vector<std::complex<double>> amp = psi.amplitude;
  half_kick(amp, effective_potential(psi, v_grid, params, &masked_a), dt, params.hbar);

  ws.forward(amp.data());
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  const double kin = -0.5 * params.hbar * dt / params.mass;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double k = k0 * static_cast<double>(ws.freq(j));
    amp[j] *= std::polar(1.0, kin * k * k);
  }
  ws.inverse(amp.data());

  // Q is re-evaluated from the intermediate state for the closing half kick.
  WaveField mid;
  mid.grid = grid;
  mid.amplitude = amp;
  half_kick(amp, effective_potential(mid, v_grid, params, &masked_b), dt, params.hbar);

  double s = 0.0;
  bool finite = true;
  for (const auto& a : amp) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) finite = false;
    s += std::norm(a);
  }
  const double norm = std::sqrt(s * grid.dx);
  const double drift = std::abs(norm - 1.0);
  if (!finite || !std::isfinite(norm) || drift > kNormDriftLimit)
    throw DivergenceError("evolution diverged");
  if (norm_drift) *norm_drift = drift;
  if (masked_out) *masked_out = std::max(masked_a, masked_b);

  const double scale = 1.0 / norm;
  for (auto& a : amp) a *= scale;
  WaveField out;
  out.grid = grid;
  out.amplitude = std::move(amp);
  return out;
}

}  // namespace

void EvolutionConfig::validate(const Grid& grid, const PhysicalParams& params) const {
  if (!(dt > 0.0)) throw std::invalid_argument("EvolutionConfig: dt must be > 0");
  const double dt_max = grid.dx * grid.dx * params.mass / (std::numbers::pi * params.hbar);
  if (!(dt < dt_max))
    throw std::invalid_argument("EvolutionConfig: dt must be below dx^2 m / (pi hbar) = " +
                                std::to_string(dt_max));
  if (n_steps < 1) throw std::invalid_argument("EvolutionConfig: n_steps must be >= 1");
  if (record_every < 1)
    throw std::invalid_argument("EvolutionConfig: record_every must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("EvolutionConfig: lambda must lie in [0, 1]");
  if (lambda != params.lambda)
    throw std::invalid_argument(
        "EvolutionConfig: lambda does not match PhysicalParams.lambda");
}

std::vector<double> quantum_potential(const PolarFields& fields,
                                      const PhysicalParams& params) {
  const Grid& grid = fields.grid;
  std::vector<double> amp_root(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) amp_root[j] = std::sqrt(fields.rho[j]);
  const auto lap = laplacian(amp_root, grid);
  const double c = -0.5 * params.hbar * params.hbar / params.mass;
  std::vector<double> q(grid.n, 0.0);
  for (std::size_t j = 0; j < grid.n; ++j)
    if (fields.valid[j]) q[j] = c * lap[j] / amp_root[j];
  return q;
}

WaveField step(const WaveField& psi, const PhysicalParams& params, double dt,
               double* norm_drift) {
  params.validate();
  const auto v_grid = params.potential.evaluate(psi.grid, params.mass);
  return step_impl(psi, v_grid, params, dt, norm_drift, nullptr);
}

Trajectory evolve(const WaveField& psi0, const PhysicalParams& params,
                  const EvolutionConfig& cfg) {
  params.validate();
  cfg.validate(psi0.grid, params);
  const auto v_grid = params.potential.evaluate(psi0.grid, params.mass);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);
  traj.norm_drifts.push_back(0.0);

  WaveField current = psi0;
  double interval_drift = 0.0;
  for (std::size_t i = 1; i <= cfg.n_steps; ++i) {
    double drift = 0.0;
    std::size_t masked = 0;
    try {
      current = step_impl(current, v_grid, params, cfg.dt, &drift, &masked);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(i));
    }
    interval_drift = std::max(interval_drift, drift);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    traj.max_masked_points = std::max(traj.max_masked_points, masked);
    if (i % cfg.record_every == 0 || i == cfg.n_steps) {
      traj.times.push_back(static_cast<double>(i) * cfg.dt);
      traj.states.push_back(current);
      traj.norm_drifts.push_back(interval_drift);
      interval_drift = 0.0;
    }
  }
  return traj;
}

MadelungResiduals madelung_residuals(const Trajectory& traj,
                                     const PhysicalParams& params) {
  if (traj.size() < 3)
    throw std::invalid_argument("madelung_residuals: need at least 3 snapshots");
  const double delta = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i + 1 < traj.times.size(); ++i) {
    const double d = traj.times[i + 1] - traj.times[i];
    if (std::abs(d - delta) > 1e-9 * std::max(1.0, std::abs(delta)))
      throw std::invalid_argument("madelung_residuals: snapshots must be uniformly spaced");
  }

  const Grid& grid = traj.states.front().grid;
  const auto& ws = workspace_for(grid);
  const auto v_grid = params.potential.evaluate(grid, params.mass);
  const double rho_floor = default_rho_floor(grid);

  MadelungResiduals res;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& psi = traj.states[i].amplitude;
    const auto& prev = traj.states[i - 1].amplitude;
    const auto& next = traj.states[i + 1].amplitude;
    const auto pf = polar_decompose(traj.states[i], rho_floor, params.hbar);
    const auto q = quantum_potential(pf, params);
    const auto dpsi = ws.gradient(traj.states[i].amplitude, grid);

    // probability flux rho v = (hbar/m) Im(conj(psi) dpsi); smooth everywhere
    std::vector<double> flux(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
      flux[j] = params.hbar / params.mass * std::imag(std::conj(psi[j]) * dpsi[j]);
    const auto div_flux = ws.gradient(flux, grid);

    for (std::size_t j = 0; j < grid.n; ++j) {
      if (!pf.valid[j]) continue;
      const double drho_dt =
          (std::norm(next[j]) - std::norm(prev[j])) / (2.0 * delta);
      res.continuity = std::max(res.continuity, std::abs(drho_dt + div_flux[j]));

      // dS/dt = hbar Im(psi_dot / psi), grad S = hbar Im(dpsi / psi);
      // both single-valued, no unwrapping needed
      const std::complex<double> psi_dot = (next[j] - prev[j]) / (2.0 * delta);
      const double ds_dt = params.hbar * std::imag(psi_dot / psi[j]);
      const double grad_s = params.hbar * std::imag(dpsi[j] / psi[j]);
      const double hj = ds_dt + grad_s * grad_s / (2.0 * params.mass) + v_grid[j] +
                        (1.0 - params.lambda) * q[j];
      res.hamilton_jacobi = std::max(res.hamilton_jacobi, std::abs(hj));
    }
  }
  return res;
}

double energy(const WaveField& psi, const PhysicalParams& params) {
  const Grid& grid = psi.grid;
  const auto& ws = workspace_for(grid);
  const auto v_grid = params.potential.evaluate(grid, params.mass);

  std::vector<std::complex<double>> hat = psi.amplitude;
  ws.forward(hat.data());
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  // Parseval: sum |psi_j|^2 dx = sum |hat_j|^2 dx / n
  double kinetic = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double k = k0 * static_cast<double>(ws.freq(j));
    kinetic += 0.5 * params.hbar * params.hbar * k * k / params.mass * std::norm(hat[j]);
  }
  kinetic *= grid.dx / static_cast<double>(grid.n);

  double potential = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    potential += v_grid[j] * std::norm(psi.amplitude[j]);
  potential *= grid.dx;
  return kinetic + potential;
}

}  // namespace nelsim
