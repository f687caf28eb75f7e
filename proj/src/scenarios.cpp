#include "nelsim/scenarios.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nelsim/errors.hpp"

namespace nelsim {
namespace {

constexpr double kBoundaryStdDevs = 8.0;

std::vector<std::complex<double>> packet_amplitude(const Grid& grid, double x0, double s0,
                                                   double p0, double hbar) {
  if (s0 <= 0.0) throw ConfigError("gaussian_packet: width must be positive");
  if (hbar <= 0.0) throw ConfigError("gaussian_packet: hbar must be positive");
  std::vector<std::complex<double>> amp(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double d = grid.x(j) - x0;
    const double envelope = std::exp(-d * d / (4.0 * s0 * s0));
    amp[j] = std::polar(envelope, p0 * grid.x(j) / hbar);
  }
  return amp;
}

void check_support(const Grid& grid, double x0, double s0) {
  if (x0 - kBoundaryStdDevs * s0 < grid.x_min ||
      x0 + kBoundaryStdDevs * s0 > grid.x_max) {
    throw ConfigError("gaussian_packet: support too close to boundary");
  }
}

}  // namespace

WaveField gaussian_packet(const Grid& grid, double x0, double s0, double p0, double hbar) {
  check_support(grid, x0, s0);
  return WaveField(grid, packet_amplitude(grid, x0, s0, p0, hbar));
}

WaveField coherent_packet(const Grid& grid, double x0, double omega,
                          const PhysicalParams& params) {
  if (omega <= 0.0) throw ConfigError("coherent_packet: omega must be positive");
  const double s0 = std::sqrt(params.hbar / (2.0 * params.mass * omega));
  // The center swings out to |x0|, so demand clearance on both sides.
  check_support(grid, x0, s0);
  check_support(grid, -x0, s0);
  return gaussian_packet(grid, x0, s0, 0.0, params.hbar);
}

WaveField two_gaussian_superposition(const Grid& grid, double x1, double s1, double p1,
                                     double x2, double s2, double p2, double hbar) {
  check_support(grid, x1, s1);
  check_support(grid, x2, s2);
  auto a = packet_amplitude(grid, x1, s1, p1, hbar);
  const auto b = packet_amplitude(grid, x2, s2, p2, hbar);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
  return WaveField(grid, std::move(a));
}

FreeGaussianMoments free_gaussian_oracle(double x0, double s0, double p0, double t,
                                         const PhysicalParams& params, const Grid& grid) {
  FreeGaussianMoments m;
  const double tau = params.hbar * t / (2.0 * params.mass * s0 * s0);
  m.mean = x0 + p0 * t / params.mass;
  m.width = s0 * std::sqrt(1.0 + tau * tau);
  m.density.resize(grid.n);
  const double norm = 1.0 / (m.width * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double d = grid.x(j) - m.mean;
    m.density[j] = norm * std::exp(-d * d / (2.0 * m.width * m.width));
  }
  return m;
}

CoherentStateMoments coherent_state_oracle(double x0, double omega, double t,
                                           const PhysicalParams& params) {
  CoherentStateMoments m;
  m.mean = x0 * std::cos(omega * t);
  m.width = std::sqrt(params.hbar / (2.0 * params.mass * omega));
  return m;
}

WaveField Scenario::initial_state() const {
  switch (builder) {
    case Builder::gaussian:
      return gaussian_packet(grid, x0, s0, p0, params.hbar);
    case Builder::coherent:
      return coherent_packet(grid, x0, omega, params);
    case Builder::superposition:
      return two_gaussian_superposition(grid, x1, s1, p1, x2, s2, p2, params.hbar);
  }
  throw ConfigError("Scenario: unknown builder");
}

}  // namespace nelsim
