#include "pivotk/montecarlo.hpp"

#include <cstdlib>
#include <string>

namespace pivotk {

unsigned default_worker_count() {
  if (const char* env = std::getenv("PIVOTK_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace pivotk
