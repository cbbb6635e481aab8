#pragma once

namespace dvspix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dvspix
