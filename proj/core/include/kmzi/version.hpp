#pragma once

namespace kmzi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kmzi
