#ifndef NELSIM_BELL_HPP
#define NELSIM_BELL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace nelsim::bell {

/// Distance-suppression factor applied to two-particle correlations:
/// F(0) = 1, F non-increasing, F -> 0 as l/lc grows.
///   exponential(p): F = exp(-(l/lc)^p)      (gaussian is exponential(2))
///   rational(p):    F = 1 / (1 + (l/lc)^p)
struct CutoffModel {
  enum class Family { exponential, rational };
  double lc = 1.0;
  Family family = Family::exponential;
  double exponent = 1.0;

  static CutoffModel exponential(double lc, double p);
  static CutoffModel gaussian(double lc) { return exponential(lc, 2.0); }
  static CutoffModel rational(double lc, double p);

  std::string family_name() const {
    return family == Family::exponential ? "exponential" : "rational";
  }
};

/// Analyzer settings for a CHSH run, stored modulo 2*pi.
struct AngleSet {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;

  AngleSet() = default;
  AngleSet(double a_, double a_prime_, double b_, double b_prime_);

  /// The settings maximizing the CHSH value for the singlet correlation.
  static AngleSet optimal();
};

struct CHSHResult {
  double s_value = 0.0;
  // E(a,b), E(a,b'), E(a',b), E(a',b')
  std::array<double, 4> correlations{};
  double l = 0.0;
};

double f_suppression(const CutoffModel& model, double l);

/// Spin-singlet correlation -cos(a - b).
double e_qm_singlet(double a, double b);

/// E(a, b; l) = e_qm_singlet(a, b) * F(l / lc).
double cutoff_correlation(const CutoffModel& model, double a, double b, double l);

/// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| at separation l.
CHSHResult chsh(const CutoffModel& model, const AngleSet& angles, double l);

/// The unique separation where the CHSH value crosses `bound`, found by
/// geometric bracketing plus bisection (monotone F makes the root unique).
double critical_scale(const CutoffModel& model, const AngleSet& angles, double bound,
                      double rel_tol = 1e-12);

struct OutcomeEstimate {
  double e_hat = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Draw n outcome pairs (s1, s2) in {-1,+1}^2 from the unique joint law with
/// uniform marginals and correlation E = cutoff_correlation(a, b; l):
///   p(s1, s2) = (1 + s1 s2 E) / 4.
/// Returns the empirical mean of s1*s2 and its standard error
/// sqrt((1 - e_hat^2)/n). Deterministic given the seed.
OutcomeEstimate sample_outcomes(const CutoffModel& model, double a, double b, double l,
                                std::size_t n, std::uint64_t seed);

}  // namespace nelsim::bell

#endif
