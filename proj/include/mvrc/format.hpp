#pragma once

#include <string>

namespace mvrc {

/// Shortest decimal string that round-trips; never locale dependent.
std::string format_number(double value);

/// Fixed notation with the given number of digits after the point.
std::string format_fixed(double value, int digits);

}  // namespace mvrc
