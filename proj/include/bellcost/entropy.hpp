#pragma once

#include <cmath>
#include <span>
#include <string>

#include "bellcost/errors.hpp"

namespace bellcost {

inline constexpr double kNormTol = 1e-9;
inline constexpr double kStructTol = 1e-12;

/// -p log2 p with the convention 0 log 0 = 0.
inline double neg_p_log2_p(double p) {
  return p > 0.0 ? -p * std::log2(p) : 0.0;
}

/// Binary entropy h(p) in bits.
inline double binary_entropy(double p) {
  if (!(p >= -kStructTol && p <= 1.0 + kStructTol)) {
    throw DomainError("binary_entropy: p = " + std::to_string(p) + " outside [0,1]");
  }
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return neg_p_log2_p(p) + neg_p_log2_p(1.0 - p);
}

/// Derivative h'(p) = log2((1-p)/p).
inline double binary_entropy_slope(double p) { return std::log2((1.0 - p) / p); }

/// Shannon entropy in bits of a finite distribution.
inline double shannon_entropy(std::span<const double> dist) {
  double sum = 0.0;
  double h = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw DomainError("shannon_entropy: negative or NaN entry");
    sum += p;
    h += neg_p_log2_p(p);
  }
  if (std::abs(sum - 1.0) > kNormTol) {
    throw DomainError("shannon_entropy: entries sum to " + std::to_string(sum));
  }
  return h;
}

inline double shannon_entropy(std::initializer_list<double> dist) {
  return shannon_entropy(std::span<const double>(dist.begin(), dist.size()));
}

}  // namespace bellcost
