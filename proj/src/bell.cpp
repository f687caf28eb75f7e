#include "nelsim/bell.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nelsim/rng.hpp"

namespace nelsim::bell {

namespace {
double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a)) throw std::invalid_argument("AngleSet: angle must be finite");
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}
}  // namespace

CutoffModel CutoffModel::exponential(double lc, double p) {
  if (!(lc > 0.0)) throw std::invalid_argument("CutoffModel: lc must be > 0");
  if (!(p > 0.0)) throw std::invalid_argument("CutoffModel: exponent must be > 0");
  return CutoffModel{lc, Family::exponential, p};
}

CutoffModel CutoffModel::rational(double lc, double p) {
  if (!(lc > 0.0)) throw std::invalid_argument("CutoffModel: lc must be > 0");
  if (!(p > 0.0)) throw std::invalid_argument("CutoffModel: exponent must be > 0");
  return CutoffModel{lc, Family::rational, p};
}

AngleSet::AngleSet(double a_, double a_prime_, double b_, double b_prime_)
    : a(wrap_angle(a_)), a_prime(wrap_angle(a_prime_)),
      b(wrap_angle(b_)), b_prime(wrap_angle(b_prime_)) {}

AngleSet AngleSet::optimal() {
  constexpr double pi = std::numbers::pi;
  return AngleSet(0.0, pi / 2.0, pi / 4.0, 3.0 * pi / 4.0);
}

double f_suppression(const CutoffModel& model, double l) {
  if (l < 0.0) throw std::invalid_argument("f_suppression: separation must be >= 0");
  if (l == 0.0) return 1.0;
  const double r = std::pow(l / model.lc, model.exponent);
  return model.family == CutoffModel::Family::exponential ? std::exp(-r)
                                                          : 1.0 / (1.0 + r);
}

double e_qm_singlet(double a, double b) { return -std::cos(a - b); }

double cutoff_correlation(const CutoffModel& model, double a, double b, double l) {
  return e_qm_singlet(a, b) * f_suppression(model, l);
}

CHSHResult chsh(const CutoffModel& model, const AngleSet& angles, double l) {
  CHSHResult r;
  r.l = l;
  r.correlations = {cutoff_correlation(model, angles.a, angles.b, l),
                    cutoff_correlation(model, angles.a, angles.b_prime, l),
                    cutoff_correlation(model, angles.a_prime, angles.b, l),
                    cutoff_correlation(model, angles.a_prime, angles.b_prime, l)};
  r.s_value = std::abs(r.correlations[0] - r.correlations[1] + r.correlations[2] +
                       r.correlations[3]);
  return r;
}

double critical_scale(const CutoffModel& model, const AngleSet& angles, double bound,
                      double rel_tol) {
  const double s0 = chsh(model, angles, 0.0).s_value;
  // s(l) = s0 F(l/lc) decays to 0, so only 0 < bound < s0 is ever crossed
  if (!(bound > 0.0) || !(bound < s0))
    throw std::domain_error("critical_scale: bound never crossed");

  double lo = 0.0;
  double hi = model.lc;
  int guard = 0;
  while (chsh(model, angles, hi).s_value > bound) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000)
      throw std::domain_error("critical_scale: bound never crossed");
  }
  for (int i = 0; i < 200 && (hi - lo) > rel_tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chsh(model, angles, mid).s_value > bound ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OutcomeEstimate sample_outcomes(const CutoffModel& model, double a, double b, double l,
                                std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_outcomes: n must be >= 1");
  const double e = cutoff_correlation(model, a, b, l);
  const double p_agree = 0.5 * (1.0 + e);
  long long sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto stream = RngStream::derive(seed, rng_domain::kBellOutcomes, i);
    // first uniform fixes s1 (marginals stay uniform), second the product
    (void)stream.next_uniform();
    const bool agree = stream.next_uniform() < p_agree;
    sum += agree ? 1 : -1;
  }
  OutcomeEstimate est;
  est.n = n;
  est.e_hat = static_cast<double>(sum) / static_cast<double>(n);
  est.std_error = std::sqrt(std::max(0.0, 1.0 - est.e_hat * est.e_hat) /
                            static_cast<double>(n));
  return est;
}

}  // namespace nelsim::bell
