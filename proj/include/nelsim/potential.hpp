#ifndef NELSIM_POTENTIAL_HPP
#define NELSIM_POTENTIAL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nelsim/grid.hpp"

namespace nelsim {

/// External potential V(x) on the grid. One of: free (V = 0), harmonic
/// (V = m w^2 x^2 / 2, centered at x = 0), rectangular barrier, or a
/// tabulated array matching the grid.
struct PotentialSpec {
  enum class Kind { free, harmonic, barrier, custom_table };

  Kind kind = Kind::free;
  double omega = 0.0;
  double height = 0.0;
  double width = 0.0;
  double center = 0.0;
  std::vector<double> table;

  static PotentialSpec free_particle() { return PotentialSpec{}; }

  static PotentialSpec harmonic(double omega) {
    if (!(omega > 0.0))
      throw std::invalid_argument("PotentialSpec: harmonic omega must be > 0");
    PotentialSpec p;
    p.kind = Kind::harmonic;
    p.omega = omega;
    return p;
  }

  static PotentialSpec barrier(double height, double width, double center) {
    if (!(width > 0.0))
      throw std::invalid_argument("PotentialSpec: barrier width must be > 0");
    PotentialSpec p;
    p.kind = Kind::barrier;
    p.height = height;
    p.width = width;
    p.center = center;
    return p;
  }

  static PotentialSpec custom(std::vector<double> values) {
    for (double v : values)
      if (!std::isfinite(v))
        throw std::invalid_argument("PotentialSpec: tabulated values must be finite");
    PotentialSpec p;
    p.kind = Kind::custom_table;
    p.table = std::move(values);
    return p;
  }

  std::vector<double> evaluate(const Grid& grid, double mass) const {
    std::vector<double> v(grid.n, 0.0);
    switch (kind) {
      case Kind::free:
        break;
      case Kind::harmonic:
        for (std::size_t j = 0; j < grid.n; ++j) {
          double x = grid.x(j);
          v[j] = 0.5 * mass * omega * omega * x * x;
        }
        break;
      case Kind::barrier:
        for (std::size_t j = 0; j < grid.n; ++j)
          if (std::abs(grid.x(j) - center) < 0.5 * width) v[j] = height;
        break;
      case Kind::custom_table:
        if (table.size() != grid.n)
          throw std::invalid_argument(
              "PotentialSpec: table length " + std::to_string(table.size()) +
              " does not match grid n = " + std::to_string(grid.n));
        v = table;
        break;
    }
    return v;
  }

  std::string name() const {
    switch (kind) {
      case Kind::free: return "free";
      case Kind::harmonic: return "harmonic";
      case Kind::barrier: return "barrier";
      case Kind::custom_table: return "custom_table";
    }
    return "?";
  }
};

}  // namespace nelsim

#endif
