#include "nelsim/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nelsim {

namespace {
// FFTW's planner is not thread-safe; executions are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(std::size_t n) : n_(n), scratch_(n) {
  if (n == 0) throw std::invalid_argument("SpectralWorkspace: n must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
  plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_fwd_ == nullptr || plan_bwd_ == nullptr)
    throw std::runtime_error("SpectralWorkspace: FFTW plan creation failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SpectralWorkspace::forward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void SpectralWorkspace::inverse(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) data[j] *= scale;
}

std::vector<std::complex<double>> SpectralWorkspace::gradient(
    const std::vector<std::complex<double>>& f, const Grid& grid) const {
  if (f.size() != n_ || grid.n != n_)
    throw std::invalid_argument("gradient: size mismatch");
  std::vector<std::complex<double>> g = f;
  forward(g.data());
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == n_ / 2) {
      g[j] = 0.0;  // Nyquist mode has no well-defined odd derivative
      continue;
    }
    const double k = k0 * static_cast<double>(freq(j));
    g[j] *= std::complex<double>(0.0, k);
  }
  inverse(g.data());
  return g;
}

std::vector<double> SpectralWorkspace::gradient(const std::vector<double>& f,
                                                const Grid& grid) const {
  std::vector<std::complex<double>> c(f.begin(), f.end());
  auto g = gradient(c, grid);
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = g[j].real();
  return out;
}

std::vector<double> SpectralWorkspace::laplacian(const std::vector<double>& f,
                                                 const Grid& grid) const {
  if (f.size() != n_ || grid.n != n_)
    throw std::invalid_argument("laplacian: size mismatch");
  std::vector<std::complex<double>> g(f.begin(), f.end());
  forward(g.data());
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (std::size_t j = 0; j < n_; ++j) {
    const double k = k0 * static_cast<double>(freq(j));
    g[j] *= -k * k;
  }
  inverse(g.data());
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = g[j].real();
  return out;
}

SpectralWorkspace& workspace_for(const Grid& grid) {
  thread_local std::map<std::size_t, std::unique_ptr<SpectralWorkspace>> cache;
  auto it = cache.find(grid.n);
  if (it == cache.end())
    it = cache.emplace(grid.n, std::make_unique<SpectralWorkspace>(grid.n)).first;
  return *it->second;
}

std::vector<double> gradient(const std::vector<double>& f, const Grid& grid) {
  return workspace_for(grid).gradient(f, grid);
}

std::vector<double> laplacian(const std::vector<double>& f, const Grid& grid) {
  return workspace_for(grid).laplacian(f, grid);
}

}  // namespace nelsim
