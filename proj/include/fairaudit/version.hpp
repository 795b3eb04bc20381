#pragma once

#include <string_view>

namespace fairaudit {

inline constexpr std::string_view kEngineVersion = "0.1.0";
inline constexpr std::string_view kSchemaVersion = "1";

}  // namespace fairaudit
