#pragma once

#include <cstdio>
#include <string>
#include <string_view>

namespace spatial_exit {

/// Shortest decimal that round-trips the double.
std::string fmt_shortest(double value);

/// printf-style fixed formatting, e.g. fmt_fixed(0.0594, 4) == "0.0594".
std::string fmt_fixed(double value, int decimals);

/// Quotes a CSV field when it contains a comma, quote, or newline.
std::string csv_quote(std::string_view field);

}  // namespace spatial_exit
