#pragma once

#include <string>

namespace sqhd {

/// Shortest round-trip decimal for CSV output (printf %.17g, '.' decimal).
std::string format_double(double value);

}  // namespace sqhd
