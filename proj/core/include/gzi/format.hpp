#pragma once

#include <string>

namespace gzi {

/// Shortest decimal text that parses back to the same double; never uses
/// exponent notation. Deterministic across runs.
std::string format_double(double v);

/// Fixed notation with `digits` fractional digits.
std::string format_fixed(double v, int digits);

/// Strict number parse of the whole string; throws ConfigError on failure.
double parse_double(const std::string& text);
long long parse_integer(const std::string& text);

}  // namespace gzi
