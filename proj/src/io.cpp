#include "sqhd/io.hpp"

#include <cstdio>

namespace sqhd {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace sqhd
