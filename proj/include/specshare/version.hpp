#pragma once

namespace specshare {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace specshare
