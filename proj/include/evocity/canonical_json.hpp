#pragma once

#include <string>

#include "json.hpp"

namespace evocity {

using Json = nlohmann::json;

/// Compact JSON with sorted object keys and every floating-point number
/// printed with exactly three decimals. Two equal documents always produce
/// identical bytes. Invalid UTF-8 inside strings is replaced, never thrown.
std::string canonical_dump(const Json& value);

/// Rounds half away from zero to three decimals; -0 becomes 0.
double round3(double value);

}  // namespace evocity
