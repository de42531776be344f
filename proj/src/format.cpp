#include "intgreen/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace intgreen {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace intgreen
