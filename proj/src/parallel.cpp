#include "growthlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace growthlab {

int default_worker_count() {
  if (const char* env = std::getenv("GROWTHLAB_WORKERS")) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(env, &pos);
      if (pos == std::string(env).size() && v > 0 && v <= 4096) return static_cast<int>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace growthlab
