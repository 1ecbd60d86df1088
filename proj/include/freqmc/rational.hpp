#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace freqmc {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "3", "0.95", ".5" or "num/den" into an exact, canonical rational.
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace freqmc
