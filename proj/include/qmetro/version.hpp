#pragma once

#include <string_view>

namespace qmetro {

inline constexpr std::string_view kVersion = "0.1.0";

/// Default CLI seed, documented in the README: bare invocations must be
/// reproducible.
inline constexpr unsigned long long kDefaultSeed = 123456789ull;

}  // namespace qmetro
