#pragma once

namespace anchorcls {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "anchorcls";

}  // namespace anchorcls
