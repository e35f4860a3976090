#pragma once

namespace epr {

inline constexpr const char* version_string = "0.1.0";
inline constexpr int format_version = 1;

} // namespace epr
