#ifndef NELSIM_GRID_HPP
#define NELSIM_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nelsim {

/// Uniform periodic 1-D spatial grid with points x_j = x_min + j*dx, j = 0..n-1.
/// The right endpoint x_max is identified with x_min.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;
  double dx = 0.0;
  static constexpr bool periodic = true;

  Grid() = default;
  Grid(double xmin, double xmax, std::size_t npoints)
      : x_min(xmin), x_max(xmax), n(npoints) {
    if (!(x_max > x_min))
      throw std::invalid_argument("Grid: x_max must exceed x_min");
    if (n < 16 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Grid: n must be a power of two >= 16");
    dx = (x_max - x_min) / static_cast<double>(n);
  }

  double length() const { return x_max - x_min; }
  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }

  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
    return xs;
  }

  /// Wrap an arbitrary position into [x_min, x_max).
  double wrap(double pos) const {
    double y = pos - x_min;
    double L = length();
    y -= L * std::floor(y / L);
    if (y >= L) y = 0.0;  // guard against rounding at the seam
    return x_min + y;
  }

  bool operator==(const Grid& other) const {
    return x_min == other.x_min && x_max == other.x_max && n == other.n;
  }
};

}  // namespace nelsim

#endif
