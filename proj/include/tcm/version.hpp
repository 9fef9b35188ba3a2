#pragma once

namespace tcm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tcm
