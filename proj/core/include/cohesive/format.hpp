#pragma once

#include <string>

namespace cohesive {

/// Shortest decimal representation that round-trips to the same double.
/// Locale independent; infinities print as "inf" / "-inf", NaN as "nan".
std::string format_double(double value);

} // namespace cohesive
