#include "nucmem/csv.hpp"

#include <cmath>
#include <cstdio>

namespace nucmem {

std::string format_scientific(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

}  // namespace nucmem
