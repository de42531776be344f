#pragma once

#include <string>

namespace intgreen {

// Shortest decimal string that round-trips to the same binary64 value
// (at most 17 significant digits). NaN and infinities print as
// "nan", "inf", "-inf".
std::string format_double(double x);

}  // namespace intgreen
