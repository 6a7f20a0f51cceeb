#pragma once

#include <cstdio>
#include <string>

namespace tubeforge::detail {

// Shortest form that always round-trips a double.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace tubeforge::detail
