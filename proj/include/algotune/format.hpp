#pragma once

#include <cmath>
#include <locale>
#include <sstream>
#include <string>

namespace algotune {

// 9 significant digits, '.' as decimal separator whatever the global locale.
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(9);
  os << x;
  return os.str();
}

}  // namespace algotune
