#include "nelsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nelsim/rng.hpp"

namespace nelsim {

namespace {

// Cumulative cell masses c[0] = 0, c[j] = sum_{i<j} rho_i dx, c[n] = 1.
std::vector<double> cell_cdf(const WaveField& psi) {
  const Grid& grid = psi.grid;
  std::vector<double> cdf(grid.n + 1, 0.0);
  for (std::size_t j = 0; j < grid.n; ++j)
    cdf[j + 1] = cdf[j] + std::norm(psi.amplitude[j]) * grid.dx;
  const double total = cdf[grid.n];
  for (auto& c : cdf) c /= total;
  cdf[grid.n] = 1.0;
  return cdf;
}

// Model CDF at x, piecewise linear across cells.
double model_cdf_at(const std::vector<double>& cdf, const Grid& grid, double x) {
  if (x <= grid.x_min) return 0.0;
  if (x >= grid.x_max) return 1.0;
  const double s = (x - grid.x_min) / grid.dx;
  auto j = static_cast<std::size_t>(s);
  if (j >= grid.n) j = grid.n - 1;
  const double frac = s - static_cast<double>(j);
  return cdf[j] + frac * (cdf[j + 1] - cdf[j]);
}

}  // namespace

ParticleEnsemble sample_initial(const WaveField& psi, std::size_t n, std::uint64_t seed) {
  return sample_initial(psi, n, seed, rng_domain::kInitialSample);
}

ParticleEnsemble sample_initial(const WaveField& psi, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument("sample_initial: n must be >= 1");
  const Grid& grid = psi.grid;
  const auto cdf = cell_cdf(psi);

  ParticleEnsemble ens;
  ens.positions.resize(n);
  ens.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = RngStream::derive(seed, stream, i).next_uniform();
    // first cell with cdf[j+1] > target; within-cell placement reuses the
    // same uniform, which is exactly inverse-CDF for the cell law
    const auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, target);
    const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        0, it - cdf.begin() - 1));
    const double mass = cdf[j + 1] - cdf[j];
    const double frac = mass > 0.0 ? (target - cdf[j]) / mass : 0.0;
    ens.positions[i] = grid.wrap(grid.x(j) + frac * grid.dx);
  }
  return ens;
}

ParticleEnsemble sde_step(const ParticleEnsemble& ens, const VelocityFields& fields,
                          const PhysicalParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sde_step: dt must be > 0");
  const double noise = std::sqrt(params.sigma() * dt);
  ParticleEnsemble out;
  out.positions.resize(ens.size());
  out.time = ens.time + dt;
  out.seed = ens.seed;
  out.step_count = ens.step_count + 1;
  const std::uint64_t stream = rng_domain::kDiffusion + ens.step_count;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double xi = RngStream::derive(ens.seed, stream, i).next_normal();
    const double x = ens.positions[i] + fields.drift_at(ens.positions[i]) * dt + noise * xi;
    out.positions[i] = fields.grid.wrap(x);
  }
  return out;
}

ParticleEnsemble propagate_ensemble(const ParticleEnsemble& ens0, const Trajectory& traj,
                                    const PhysicalParams& params, std::size_t substeps) {
  if (traj.size() == 0)
    throw std::invalid_argument("propagate_ensemble: empty trajectory");
  if (std::abs(ens0.time - traj.times.front()) > 1e-9)
    throw std::invalid_argument(
        "propagate_ensemble: ensemble time does not match trajectory start");
  if (substeps < 1)
    throw std::invalid_argument("propagate_ensemble: substeps must be >= 1");

  ParticleEnsemble ens = ens0;
  const double clamp = default_drift_clamp(traj.states.front().grid);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const auto fields = drift_fields(traj.states[i], params, clamp);
    const double dt = (traj.times[i + 1] - traj.times[i]) / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s)
      ens = sde_step(ens, fields, params, dt);
    ens.time = traj.times[i + 1];  // pin against accumulation error
  }
  return ens;
}

double model_cdf(const WaveField& psi, double x) {
  return model_cdf_at(cell_cdf(psi), psi.grid, x);
}

FitResult born_fit(const ParticleEnsemble& ens, const WaveField& psi, std::size_t n_bins) {
  if (n_bins < 10) throw std::invalid_argument("born_fit: n_bins must be >= 10");
  if (ens.size() == 0) throw std::invalid_argument("born_fit: ensemble is empty");
  const Grid& grid = psi.grid;
  const auto cdf = cell_cdf(psi);
  const double inv_n = 1.0 / static_cast<double>(ens.size());

  // histogram L1 over uniform bins spanning the domain
  const double bin_w = grid.length() / static_cast<double>(n_bins);
  std::vector<double> counts(n_bins, 0.0);
  for (double x : ens.positions) {
    auto b = static_cast<std::size_t>((grid.wrap(x) - grid.x_min) / bin_w);
    if (b >= n_bins) b = n_bins - 1;
    counts[b] += inv_n;
  }
  double l1 = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double lo = grid.x_min + static_cast<double>(b) * bin_w;
    const double p = model_cdf_at(cdf, grid, lo + bin_w) - model_cdf_at(cdf, grid, lo);
    l1 += std::abs(counts[b] - p);
  }

  // exact KS against the continuous model CDF
  std::vector<double> sorted = ens.positions;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = model_cdf_at(cdf, grid, sorted[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) * inv_n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) * inv_n - f));
  }

  FitResult fit;
  fit.l1_distance = l1;
  fit.ks_statistic = ks;
  fit.n_particles = ens.size();
  fit.n_bins = n_bins;
  return fit;
}

}  // namespace nelsim
