#ifndef NELSIM_SCENARIOS_HPP
#define NELSIM_SCENARIOS_HPP

#include <string>
#include <vector>

#include "nelsim/dynamics.hpp"
#include "nelsim/wavefield.hpp"

namespace nelsim {

/// Normalized packet psi(x) ~ exp(-(x - x0)^2 / (4 s0^2) + i p0 x / hbar),
/// i.e. |psi|^2 is Gaussian with standard deviation s0. Throws if the
/// support comes within 8 standard deviations of the domain boundary.
WaveField gaussian_packet(const Grid& grid, double x0, double s0, double p0, double hbar);

/// Ground-state-width packet of the harmonic well, displaced to x0:
/// s0 = sqrt(hbar / (2 m omega)), p0 = 0. Its center oscillates classically.
WaveField coherent_packet(const Grid& grid, double x0, double omega,
                          const PhysicalParams& params);

/// Equal-weight superposition of two packets; develops nodes where they
/// interfere destructively.
WaveField two_gaussian_superposition(const Grid& grid, double x1, double s1, double p1,
                                     double x2, double s2, double p2, double hbar);

struct FreeGaussianMoments {
  double mean = 0.0;
  double width = 0.0;
  std::vector<double> density;
};

/// Closed-form moments of a freely evolving Gaussian packet:
///   mean(t)  = x0 + p0 t / m
///   width(t) = s0 sqrt(1 + (hbar t / (2 m s0^2))^2)
/// plus the corresponding Gaussian density sampled on the grid.
FreeGaussianMoments free_gaussian_oracle(double x0, double s0, double p0, double t,
                                         const PhysicalParams& params, const Grid& grid);

struct CoherentStateMoments {
  double mean = 0.0;
  double width = 0.0;
};

/// Closed-form center and (constant) width of the oscillating packet:
///   mean(t) = x0 cos(omega t), width = sqrt(hbar / (2 m omega)).
CoherentStateMoments coherent_state_oracle(double x0, double omega, double t,
                                           const PhysicalParams& params);

/// A named, fully specified experiment setup: initial state builder plus
/// physics and evolution parameters.
struct Scenario {
  enum class Builder { gaussian, coherent, superposition };

  std::string name;
  Builder builder = Builder::gaussian;
  Grid grid;
  // gaussian: x0, s0, p0; coherent: x0, omega; superposition: both packets
  double x0 = 0.0, s0 = 1.0, p0 = 0.0;
  double omega = 1.0;
  double x1 = 0.0, s1 = 1.0, p1 = 0.0;
  double x2 = 0.0, s2 = 1.0, p2 = 0.0;
  PhysicalParams params;
  EvolutionConfig evolution;

  WaveField initial_state() const;
};

}  // namespace nelsim

#endif
