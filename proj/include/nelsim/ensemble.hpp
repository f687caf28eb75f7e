#ifndef NELSIM_ENSEMBLE_HPP
#define NELSIM_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "nelsim/drift.hpp"
#include "nelsim/dynamics.hpp"

namespace nelsim {

/// Walker positions realizing the configuration-space diffusion. The RNG
/// state is the (seed, step counter) pair: each particle's noise at each step
/// comes from a stream keyed by (seed, step, particle), so identical seeds
/// reproduce identical ensembles bit for bit regardless of execution order.
struct ParticleEnsemble {
  std::vector<double> positions;
  double time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 0;

  std::size_t size() const { return positions.size(); }
};

/// Histogram / CDF agreement between an ensemble and |psi|^2.
struct FitResult {
  double l1_distance = 0.0;   // sum over bins of |p_hat - p|, in [0, 2]
  double ks_statistic = 0.0;  // sup |empirical CDF - model CDF|, in [0, 1]
  std::size_t n_particles = 0;
  std::size_t n_bins = 0;
};

/// n independent draws from |psi|^2 by inverse-CDF sampling over grid cells
/// [x_j, x_j + dx) with uniform placement within a cell. `stream` selects an
/// independent substream of the seed (rng_domain::kInitialSample by default).
ParticleEnsemble sample_initial(const WaveField& psi, std::size_t n, std::uint64_t seed);
ParticleEnsemble sample_initial(const WaveField& psi, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream);

/// One Euler-Maruyama step
///   X <- X + b(X) dt + sqrt(sigma dt) xi,
/// with b linearly interpolated from the grid, xi standard normal per
/// particle, and positions wrapped periodically. The noise variance
/// sigma dt = (hbar/m) dt is what makes the osmotic drift balance the
/// diffusion in stationary states.
ParticleEnsemble sde_step(const ParticleEnsemble& ens, const VelocityFields& fields,
                          const PhysicalParams& params, double dt);

/// Advance the ensemble along a recorded trajectory: the drift is refreshed
/// from the nearest earlier snapshot and held for `substeps` SDE steps per
/// snapshot interval. Requires ens0.time to match the trajectory start.
ParticleEnsemble propagate_ensemble(const ParticleEnsemble& ens0, const Trajectory& traj,
                                    const PhysicalParams& params, std::size_t substeps);

/// Compare ensemble positions against |psi|^2: histogram L1 distance over
/// n_bins uniform bins, plus the exact Kolmogorov-Smirnov statistic of the
/// sorted positions against the piecewise-linear model CDF (the same cell
/// law sample_initial draws from).
FitResult born_fit(const ParticleEnsemble& ens, const WaveField& psi, std::size_t n_bins);

/// The piecewise-linear CDF of |psi|^2 evaluated at x — the reference law
/// used by both sample_initial and born_fit.
double model_cdf(const WaveField& psi, double x);

}  // namespace nelsim

#endif
