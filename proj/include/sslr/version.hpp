#pragma once

namespace sslr {

inline constexpr const char* tool_name = "sslr-lab";
inline constexpr const char* tool_version = "0.1.0";

} // namespace sslr
