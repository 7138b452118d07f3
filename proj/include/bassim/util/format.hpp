#pragma once

#include <string>

#include "bassim/util/sim_time.hpp"

namespace bassim {

// Exact decimal seconds with trailing zeros trimmed: 1.875, 36000, 0.000125.
std::string format_seconds(SimTime t);
// Shortest round-trip text for a float.
std::string format_float(float v);
// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace bassim
