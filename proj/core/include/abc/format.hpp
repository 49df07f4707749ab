#pragma once

#include <string>

namespace abc {

// Shortest-round-trip is not required; 17 significant digits reproduce any double.
std::string format_double(double value);

}  // namespace abc
