#pragma once

namespace iqn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace iqn
