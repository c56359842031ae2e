#pragma once

#include <string_view>

namespace mdabc {

inline constexpr std::string_view kProjectName = "mdabc";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace mdabc
