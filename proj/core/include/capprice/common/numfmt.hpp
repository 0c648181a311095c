#pragma once

#include <string>

namespace capprice {

/// Shortest decimal text that parses back to the same double.
std::string fmt_num(double v);

/// Fixed number of decimals, for human-facing tables.
std::string fmt_fixed(double v, int decimals);

}  // namespace capprice
