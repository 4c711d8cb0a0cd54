#pragma once

#include <cstdio>
#include <string>

namespace memgap {

/// Shortest round-trippable decimal form of a 64-bit float (17 significant
/// digits), so written values re-read bit-exactly.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace memgap
