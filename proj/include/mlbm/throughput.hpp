#pragma once

#include <cstdint>
#include <stdexcept>

namespace mlbm {

/// Millions of fluid lattice node updates per second.
inline double mflups(std::uint64_t cells, std::uint64_t steps, double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("mflups needs a positive duration");
  return static_cast<double>(cells) * static_cast<double>(steps) / (seconds * 1e6);
}

}  // namespace mlbm
