#ifndef NELSIM_DYNAMICS_HPP
#define NELSIM_DYNAMICS_HPP

#include <cstddef>
#include <vector>

#include "nelsim/wavefield.hpp"

namespace nelsim {

struct EvolutionConfig {
  double dt = 0.0;
  std::size_t n_steps = 0;
  double lambda = 0.0;  // mirrors PhysicalParams.lambda; checked for agreement
  std::size_t record_every = 1;

  void validate(const Grid& grid, const PhysicalParams& params) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WaveField> states;

  // diagnostics accumulated by evolve(): norm_drifts[i] is the worst
  // pre-renormalization drift over the steps leading to snapshot i (0 at t=0)
  std::vector<double> norm_drifts;
  double max_norm_drift = 0.0;
  std::size_t max_masked_points = 0;

  std::size_t size() const { return states.size(); }
};

/// Q = -(hbar^2/2m) lap(sqrt(rho)) / sqrt(rho) on valid points, 0 on masked
/// points (the phase-free choice near nodes).
std::vector<double> quantum_potential(const PolarFields& fields,
                                      const PhysicalParams& params);

/// One Strang-split step of
///   i hbar d(psi)/dt = [-(hbar^2/2m) d2/dx2 + V - lambda Q] psi:
/// a half kick by exp(-i (V - lambda Q) dt / 2 hbar) with Q taken from the
/// incoming state, a full kinetic step in Fourier space, and a second half
/// kick with Q re-evaluated from the intermediate state. The factors all have
/// unit modulus, so the norm is preserved; the output is renormalized and the
/// residual drift reported through norm_drift when given.
WaveField step(const WaveField& psi, const PhysicalParams& params, double dt,
               double* norm_drift = nullptr);

/// Repeated stepping with snapshots every record_every steps; the t = 0 and
/// final states are always included.
Trajectory evolve(const WaveField& psi0, const PhysicalParams& params,
                  const EvolutionConfig& cfg);

struct MadelungResiduals {
  double continuity = 0.0;
  double hamilton_jacobi = 0.0;
};

/// Max-norm residuals of the continuity equation
///   d(rho)/dt + div(rho grad(S)/m) = 0
/// and the phase equation
///   d(S)/dt + (grad S)^2/2m + V + (1 - lambda) Q = 0
/// over interior snapshots, evaluated on unmasked points. Time derivatives
/// are central differences across the recorded snapshots, which must be
/// uniformly spaced; spatial derivatives are spectral, taken through psi
/// itself so that masked tail points cannot pollute the interior.
MadelungResiduals madelung_residuals(const Trajectory& traj,
                                     const PhysicalParams& params);

/// <psi|H|psi> with H = -(hbar^2/2m) d2/dx2 + V; conserved at lambda = 0.
double energy(const WaveField& psi, const PhysicalParams& params);

}  // namespace nelsim

#endif
