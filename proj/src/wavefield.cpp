#include "nelsim/wavefield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nelsim/spectral.hpp"

namespace nelsim {

WaveField::WaveField(const Grid& g, std::vector<std::complex<double>> raw)
    : grid(g), amplitude(std::move(raw)) {
  if (amplitude.size() != grid.n)
    throw std::invalid_argument("WaveField: amplitude length does not match grid");
  double s = 0.0;
  for (const auto& a : amplitude) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("WaveField: non-finite amplitude");
    s += std::norm(a);
  }
  s *= grid.dx;
  if (!(s > 0.0))
    throw std::invalid_argument("WaveField: state has zero norm");
  const double scale = 1.0 / std::sqrt(s);
  for (auto& a : amplitude) a *= scale;
}

double WaveField::norm() const {
  double s = 0.0;
  for (const auto& a : amplitude) s += std::norm(a);
  return std::sqrt(s * grid.dx);
}

std::vector<double> WaveField::density() const {
  std::vector<double> rho(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) rho[j] = std::norm(amplitude[j]);
  return rho;
}

std::size_t PolarFields::masked_count() const {
  std::size_t c = 0;
  for (auto v : valid)
    if (!v) ++c;
  return c;
}

double default_rho_floor(const Grid& grid) { return 1e-12 / grid.length(); }

PolarFields polar_decompose(const WaveField& psi, double rho_floor, double hbar) {
  const Grid& grid = psi.grid;
  if (!(rho_floor > 0.0) || !(rho_floor < 1.0 / grid.length()))
    throw std::invalid_argument(
        "polar_decompose: rho_floor must lie in (0, 1/domain_length)");

  PolarFields out;
  out.grid = grid;
  out.rho.resize(grid.n);
  out.action.assign(grid.n, 0.0);
  out.valid.resize(grid.n);

  std::size_t n_valid = 0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    out.rho[j] = std::norm(psi.amplitude[j]);
    out.valid[j] = out.rho[j] >= rho_floor ? 1 : 0;
    n_valid += out.valid[j];
  }
  if (n_valid == 0)
    throw std::invalid_argument("polar_decompose: state vanishes everywhere");

  // Unwrap the phase scanning left to right. Consecutive valid points are
  // kept within pi of each other; after a masked gap the chain restarts at
  // the principal value.
  constexpr double two_pi = 2.0 * std::numbers::pi;
  bool chain = false;
  double phase_prev = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    if (!out.valid[j]) {
      chain = false;
      continue;
    }
    const double theta = std::arg(psi.amplitude[j]);
    double phase;
    if (!chain) {
      phase = theta;
    } else {
      double d = theta - phase_prev;
      d -= two_pi * std::round(d / two_pi);
      phase = phase_prev + d;
    }
    out.action[j] = hbar * phase;
    phase_prev = phase;
    chain = true;
  }
  return out;
}

WaveField polar_compose(const PolarFields& fields, double hbar) {
  const Grid& grid = fields.grid;
  if (fields.rho.size() != grid.n || fields.action.size() != grid.n ||
      fields.valid.size() != grid.n)
    throw std::invalid_argument("polar_compose: field lengths do not match grid");
  double mass = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    if (!(fields.rho[j] >= 0.0) || !std::isfinite(fields.rho[j]))
      throw std::invalid_argument("polar_compose: rho must be finite and nonnegative");
    if (!std::isfinite(fields.action[j]))
      throw std::invalid_argument("polar_compose: action must be finite");
    mass += fields.rho[j];
  }
  mass *= grid.dx;
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("polar_compose: rho is not normalized");

  std::vector<std::complex<double>> amp(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    amp[j] = std::polar(std::sqrt(fields.rho[j]), fields.action[j] / hbar);
  return WaveField(grid, std::move(amp));
}

double mean_position(const WaveField& psi) {
  double m = 0.0;
  for (std::size_t j = 0; j < psi.grid.n; ++j)
    m += psi.grid.x(j) * std::norm(psi.amplitude[j]);
  return m * psi.grid.dx;
}

double position_width(const WaveField& psi) {
  const double mu = mean_position(psi);
  double v = 0.0;
  for (std::size_t j = 0; j < psi.grid.n; ++j) {
    const double d = psi.grid.x(j) - mu;
    v += d * d * std::norm(psi.amplitude[j]);
  }
  return std::sqrt(v * psi.grid.dx);
}

double mean_momentum(const WaveField& psi, double hbar) {
  const auto& ws = workspace_for(psi.grid);
  std::vector<std::complex<double>> hat = psi.amplitude;
  ws.forward(hat.data());
  const double k0 = 2.0 * std::numbers::pi / psi.grid.length();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < psi.grid.n; ++j) {
    const double w = std::norm(hat[j]);
    num += w * k0 * static_cast<double>(ws.freq(j));
    den += w;
  }
  return hbar * num / den;
}

}  // namespace nelsim
