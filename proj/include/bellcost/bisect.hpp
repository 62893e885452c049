#pragma once

#include <cmath>
#include <string>

#include "bellcost/errors.hpp"

namespace bellcost {

/// Plain bisection for a sign change of fn on [lo, hi]. Stops once the
/// bracket is narrower than xtol or can no longer be split in double
/// precision, whichever comes first. Returns the bracket midpoint.
template <typename Fn>
double bisect(Fn&& fn, double lo, double hi, double xtol = 0.0) {
  double flo = fn(lo);
  const double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
    const double fmid = fn(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bellcost
