#pragma once

// Minimal mutual-information curves I(S) for the CHSH parameter S in [2,4]
// under each causal class, with uniform settings p(x,y) = 1/4.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bellcost/bisect.hpp"
#include "bellcost/entropy.hpp"
#include "bellcost/errors.hpp"
#include "bellcost/model.hpp"

namespace bellcost {

enum class CausalBranch { I1, I2 };

inline const char* to_string(CausalBranch b) { return b == CausalBranch::I1 ? "I1" : "I2"; }

struct CurvePoint {
  double s = 2.0;
  double info = 0.0;
  std::optional<CausalBranch> branch;
};

/// Two abscissae with f(p) = f(p_star), p <= p0 <= p_star.
struct ConjugatePair {
  double p = 0.0;
  double p_star = 0.5;
};

namespace detail {

inline constexpr double kSlack = 1e-12;

inline double checked_s(const char* op, double s) {
  if (!(s >= 2.0 - kSlack && s <= 4.0 + kSlack)) {
    throw DomainError(std::string(op) + ": S = " + std::to_string(s) + " outside [2,4]");
  }
  return std::clamp(s, 2.0, 4.0);
}

}  // namespace detail

/// f(p) = p log2((1-p)/p) on [0, 1/2], with f(0) = 0.
inline double f_of_p(double p) {
  if (!(p >= -detail::kSlack && p <= 0.5 + detail::kSlack)) {
    throw DomainError("f_of_p: p = " + std::to_string(p) + " outside [0, 1/2]");
  }
  if (p <= 0.0) return 0.0;
  return p * std::log2((1.0 - p) / p);
}

/// df/dp = log2((1-p)/p) - 1/((1-p) ln 2).
inline double f_slope(double p) {
  return std::log2((1.0 - p) / p) - 1.0 / ((1.0 - p) * std::log(2.0));
}

/// Maximizer p0 of f on (0, 1/2), approximately 0.218. Computed once.
inline double find_p0() {
  static const double p0 = [] {
    constexpr double lo = 0.01, hi = 0.49;
    if (!(f_slope(lo) > 0.0 && f_slope(hi) < 0.0)) throw DomainError("find_p0: bracket lost");
    return bisect(f_slope, lo, hi, 1e-15);
  }();
  return p0;
}

/// S0 = 4 - 8 p0^2, where the two causal branches meet (about 3.620).
inline double s0() { return 4.0 - 8.0 * find_p0() * find_p0(); }

/// Second abscissa p* in [p0, 1/2] with f(p*) = f(p).
inline ConjugatePair conjugate(double p) {
  const double p0 = find_p0();
  if (!(p >= -detail::kSlack && p <= p0 + detail::kSlack)) {
    throw DomainError("conjugate: p = " + std::to_string(p) + " outside [0, p0]");
  }
  if (p <= 0.0) return {0.0, 0.5};
  if (p >= p0) return {p0, p0};
  const double target = f_of_p(p);
  const double ps = bisect([target](double x) { return f_of_p(x) - target; }, p0, 0.5, 0.0);
  return {p, ps};
}

/// The pair (p, p*) on the second causal branch with 4 - 8 p p* = s.
/// Writing p* = q/p with q = (4-s)/8 keeps the S constraint exact and leaves
/// a single bisection for f(p) = f(q/p) on [2q, q/p0], which excludes the
/// trivial root p = sqrt(q).
inline ConjugatePair causal_pair(double s) {
  s = detail::checked_s("causal_pair", s);
  const double p0 = find_p0();
  const double s_zero = s0();
  if (s < s_zero - 1e-9) {
    throw DomainError("causal_pair: S = " + std::to_string(s) + " below S0");
  }
  if (s >= 4.0) return {0.0, 0.5};
  if (s <= s_zero) return {p0, p0};
  const double q = (4.0 - s) / 8.0;
  const double lo = 2.0 * q;
  const double hi = q / p0;
  auto gap = [q](double p) { return f_of_p(p) - f_of_p(std::min(0.5, q / p)); };
  if (!(gap(hi) < 0.0)) return {p0, p0};  // s indistinguishable from S0
  const double p = bisect(gap, lo, hi, 0.0);
  return {p, q / p};
}

/// Retrocausal (unconstrained) minimum: 2 - h((4-S)/8) - ((4+S)/8) log2 3.
inline double i_R(double s) {
  s = detail::checked_s("i_R", s);
  return 2.0 - binary_entropy((4.0 - s) / 8.0) - (4.0 + s) / 8.0 * std::log2(3.0);
}

/// Causal branch with p_X = p_Y: 2 - 2 h(sqrt((4-S)/8)).
inline double i_1(double s) {
  s = detail::checked_s("i_1", s);
  return 2.0 - 2.0 * binary_entropy(std::sqrt((4.0 - s) / 8.0));
}

/// Causal branch with p_Y = p_X*, defined for S >= S0.
inline double i_2(double s) {
  s = detail::checked_s("i_2", s);
  if (s < s0() - 1e-9) throw DomainError("i_2: S = " + std::to_string(s) + " below S0");
  if (s >= 4.0) return 1.0;
  if (s <= s0()) return i_1(s);
  const auto pair = causal_pair(s);
  return 2.0 - binary_entropy(pair.p) - binary_entropy(pair.p_star);
}

inline CurvePoint i_C(double s) {
  s = detail::checked_s("i_C", s);
  if (s <= s0()) return {s, i_1(s), CausalBranch::I1};
  return {s, i_2(s), CausalBranch::I2};
}

/// Zigzag dependence is information-equivalent to causal dependence.
inline CurvePoint i_Z(double s) { return i_C(s); }

inline double i_OS(double s) {
  s = detail::checked_s("i_OS", s);
  return 1.0 - binary_entropy(s / 4.0);
}

inline double i_SD(double s) {
  (void)detail::checked_s("i_SD", s);
  return 2.0;
}

inline CurvePoint curve_point(CausalClass c, double s) {
  switch (c) {
    case CausalClass::Retrocausal: return {detail::checked_s("i_R", s), i_R(s), std::nullopt};
    case CausalClass::Causal: return i_C(s);
    case CausalClass::Zigzag: return i_Z(s);
    case CausalClass::OneSided: return {detail::checked_s("i_OS", s), i_OS(s), std::nullopt};
    case CausalClass::Superdeterministic:
      return {detail::checked_s("i_SD", s), i_SD(s), std::nullopt};
  }
  throw DomainError("curve_point: unknown class");
}

/// n evenly spaced points on [s_min, s_max], endpoints included.
inline std::vector<CurvePoint> curve_sweep(CausalClass c, double s_min, double s_max, int n) {
  if (n < 2) throw DomainError("curve_sweep: need at least 2 points");
  if (!(s_min <= s_max)) throw DomainError("curve_sweep: s_min > s_max");
  (void)detail::checked_s("curve_sweep", s_min);
  (void)detail::checked_s("curve_sweep", s_max);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = k + 1 == n ? s_max : s_min + (s_max - s_min) * k / (n - 1);
    out.push_back(curve_point(c, s));
  }
  return out;
}

inline std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// CSV with header S,I,branch,class; branch is empty outside the causal classes.
inline void write_sweep_csv(std::ostream& os, CausalClass c, const std::vector<CurvePoint>& pts) {
  os << "S,I,branch,class\n";
  for (const auto& pt : pts) {
    os << format_sig12(pt.s) << ',' << format_sig12(pt.info) << ','
       << (pt.branch ? to_string(*pt.branch) : "") << ',' << to_string(c) << '\n';
  }
}

struct AppendixReport {
  double p0 = 0.0;
  double s0 = 0.0;
  double slope_i1_at_s0 = 0.0;
  double slope_i2_at_s0 = 0.0;
  double slope_closed_form = 0.0;  // h'(p0) / (8 p0)
  double min_i1_second = 0.0;
  double min_i1_second_symbolic = 0.0;
  double max_i1_second_mismatch = 0.0;  // relative, numerical vs symbolic
  double min_i2_second = 0.0;
  bool f_ratio_monotone = false;
  int grid_points = 0;
};

/// Symbolic I1''(S) at p = sqrt((4-S)/8).
inline double i1_second_symbolic(double s) {
  const double p = std::sqrt((4.0 - s) / 8.0);
  return (std::log2((1.0 - p) / p) + 1.0 / ((1.0 - p) * std::log(2.0))) / (128.0 * p * p * p);
}

/// Tangency and convexity checks for the two causal branches.
/// Slopes use step 1e-5; second differences use step 1e-4 on interior grids
/// so that every stencil stays inside the branch's domain. I2 is undefined
/// below S0, so its slope at S0 uses the second-order one-sided stencil.
inline AppendixReport appendix_checks(int grid_points = 400) {
  constexpr double slope_h = 1e-5;
  constexpr double curv_h = 1e-4;
  AppendixReport r;
  r.grid_points = grid_points;
  r.p0 = find_p0();
  r.s0 = s0();
  r.slope_closed_form = binary_entropy_slope(r.p0) / (8.0 * r.p0);
  r.slope_i1_at_s0 = (i_1(r.s0 + slope_h) - i_1(r.s0 - slope_h)) / (2.0 * slope_h);
  r.slope_i2_at_s0 =
      (-3.0 * i_2(r.s0) + 4.0 * i_2(r.s0 + slope_h) - i_2(r.s0 + 2.0 * slope_h)) / (2.0 * slope_h);

  auto second = [curv_h](auto&& fn, double s) {
    return (fn(s + curv_h) - 2.0 * fn(s) + fn(s - curv_h)) / (curv_h * curv_h);
  };
  auto grid = [grid_points, curv_h](double a, double b, int k) {
    const double lo = a + curv_h;
    const double hi = b - curv_h;
    return lo + (hi - lo) * k / (grid_points - 1);
  };

  r.min_i1_second = std::numeric_limits<double>::infinity();
  r.min_i1_second_symbolic = std::numeric_limits<double>::infinity();
  r.min_i2_second = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_points; ++k) {
    const double s = grid(2.0, 4.0, k);
    const double num = second(i_1, s);
    const double sym = i1_second_symbolic(s);
    r.min_i1_second = std::min(r.min_i1_second, num);
    r.min_i1_second_symbolic = std::min(r.min_i1_second_symbolic, sym);
    // I1'' diverges at S = 4; compare only where the stencil resolves it.
    if (4.0 - s > 1e-2) {
      r.max_i1_second_mismatch = std::max(r.max_i1_second_mismatch, std::abs(num - sym) / sym);
    }
  }
  double prev_ratio = -std::numeric_limits<double>::infinity();
  r.f_ratio_monotone = true;
  for (int k = 0; k < grid_points; ++k) {
    const double s = grid(r.s0, 4.0, k);
    r.min_i2_second = std::min(r.min_i2_second, second(i_2, s));
    const double ratio = f_of_p(causal_pair(s).p) / (4.0 - s);
    if (!(ratio > prev_ratio)) r.f_ratio_monotone = false;
    prev_ratio = ratio;
  }
  return r;
}

}  // namespace bellcost
