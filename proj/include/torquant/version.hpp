#pragma once

#define TORQUANT_VERSION_MAJOR 0
#define TORQUANT_VERSION_MINOR 1
#define TORQUANT_VERSION_PATCH 0

namespace torquant {

inline constexpr const char* version_string() { return "0.1.0"; }

} // namespace torquant
