#pragma once

namespace gmvp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gmvp
