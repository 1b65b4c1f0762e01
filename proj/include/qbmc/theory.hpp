#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace qbmc {

enum class ProblemKind { BLR, IMC };

/// Known constants for the oracle bound: sub-exponential noise constants
/// (sigma, xi), the sup-norm level C of the true prediction, the slack delta,
/// the failure probability epsilon, problem dimensions and design norms.
/// For the partially observed problem, m is the observation count.
struct TheoryInputs {
  double sigma = 1.0;
  double xi = 1.0;
  double c_level = 1.0;
  double delta = 1.0;
  double epsilon = 0.1;
  int n = 0;
  int q = 0;
  int p = 0;
  int k = 0;
  long long m = 0;
  double x_norm_f = 0;  // |X|_F
  double z_norm_f = 0;  // |Z|_F
};

struct TheoryConstants {
  double c1 = 0;           // 8 (sigma^2 + C^2)
  double c2 = 0;           // 64 C max(xi, C)
  double tau_star = 0;
  double lambda_star = 0;
};

namespace detail {

inline double sample_count(const TheoryInputs& inp, ProblemKind problem) {
  return problem == ProblemKind::BLR
             ? static_cast<double>(inp.n) * static_cast<double>(inp.q)
             : static_cast<double>(inp.m);
}

inline void check_theory_inputs(const TheoryInputs& inp, ProblemKind problem) {
  if (inp.sigma < 0 || inp.xi < 0 || !(inp.c_level > 0) || !(inp.delta > 0))
    throw std::invalid_argument("theory: constants must be positive");
  if (!(inp.epsilon > 0 && inp.epsilon < 1))
    throw std::invalid_argument("theory: epsilon must lie in (0,1)");
  if (inp.n < 1 || inp.q < 1 || inp.p < 1 || inp.k < 1)
    throw std::invalid_argument("theory: dimensions must be positive");
  if (problem == ProblemKind::IMC && inp.m < 1)
    throw std::invalid_argument("theory: observation count m must be positive");
}

}  // namespace detail

/// Derived prior scale and inverse temperature:
///   tau*^2   = C1 (k+p) / (nkq |X|_F^2 |Z|_F^2)   (mkp in place of nkq when partial)
///   lambda*  = nq min(1/(2 C2), delta/(C1 (1+delta)))   (m in place of nq)
inline TheoryConstants derive_constants(const TheoryInputs& inp, ProblemKind problem) {
  detail::check_theory_inputs(inp, problem);
  TheoryConstants out;
  out.c1 = 8.0 * (inp.sigma * inp.sigma + inp.c_level * inp.c_level);
  out.c2 = 64.0 * inp.c_level * std::max(inp.xi, inp.c_level);
  const double design_sq = inp.x_norm_f * inp.x_norm_f * inp.z_norm_f * inp.z_norm_f;
  const double count = detail::sample_count(inp, problem);
  const double cells = problem == ProblemKind::BLR
                           ? static_cast<double>(inp.n) * inp.k * inp.q
                           : static_cast<double>(inp.m) * inp.k * inp.p;
  out.tau_star = std::sqrt(out.c1 * (inp.k + inp.p) / (cells * design_sq));
  out.lambda_star =
      count * std::min(1.0 / (2.0 * out.c2), inp.delta / (out.c1 * (1.0 + inp.delta)));
  return out;
}

/// Residual (non-oracle) part of the oracle inequality, on the per-entry
/// scale: the complexity bracket divided by nq (full observations) or by m
/// (partial observations). Evaluated at a candidate of rank r and Frobenius
/// norm mbar_norm; r = 0 contributes no complexity term.
inline double oracle_bound(const TheoryInputs& inp, const TheoryConstants& consts,
                           double mbar_norm, int r, ProblemKind problem) {
  detail::check_theory_inputs(inp, problem);
  if (r < 0) throw std::invalid_argument("oracle_bound: negative rank");
  if (mbar_norm < 0) throw std::invalid_argument("oracle_bound: negative norm");
  const double kp = static_cast<double>(inp.k) + inp.p;
  double complexity = 0;
  if (r > 0) {
    const double cells = problem == ProblemKind::BLR
                             ? static_cast<double>(inp.n) * inp.k * inp.q
                             : static_cast<double>(inp.m) * inp.k * inp.p;
    const double log_arg = 1.0 + inp.x_norm_f * inp.z_norm_f * mbar_norm /
                                     std::sqrt(consts.c1) * std::sqrt(cells / (r * kp));
    complexity = 4.0 * r * (kp + 2.0) * std::log(log_arg);
  }
  const double bracket = complexity + kp + 2.0 * std::log(2.0 / inp.epsilon);
  const double prefactor =
      consts.c1 * (1.0 + inp.delta) * (1.0 + inp.delta) / inp.delta;
  return prefactor * bracket / detail::sample_count(inp, problem);
}

/// Fraction of replication errors falling below the bound; the empirical
/// counterpart of "with probability at least 1 - epsilon".
inline double empirical_coverage(std::span<const double> errors, double bound) {
  if (errors.empty()) throw std::invalid_argument("empirical_coverage: no errors given");
  std::size_t below = 0;
  for (double e : errors)
    if (e <= bound) ++below;
  return static_cast<double>(below) / static_cast<double>(errors.size());
}

}  // namespace qbmc
