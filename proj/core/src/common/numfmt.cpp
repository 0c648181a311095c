#include "capprice/common/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace capprice {

std::string fmt_num(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

}  // namespace capprice
