#pragma once

namespace inverseset {

inline constexpr const char* kToolName = "inverseset";
inline constexpr const char* kToolVersion = "inverseset 1.0.0";

}  // namespace inverseset
