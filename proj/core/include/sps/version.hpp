#pragma once

namespace sps {

inline constexpr const char* kToolName = "sps-sim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sps
