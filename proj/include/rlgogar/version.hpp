#pragma once

namespace rlgogar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rlgogar
