#pragma once

#include <string>

namespace nucmem {

/// Scientific notation with 9 significant digits; "nan" for NaN.
std::string format_scientific(double value);

}  // namespace nucmem
