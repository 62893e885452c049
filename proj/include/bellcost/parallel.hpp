#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace bellcost {

/// Worker count: `requested` if non-zero, else the hardware concurrency,
/// capped by the BELLCOST_THREADS environment variable when set.
inline unsigned worker_count(unsigned requested = 0) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BELLCOST_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // unparsable values are ignored
    }
  }
  return std::max(1u, n);
}

}  // namespace bellcost
