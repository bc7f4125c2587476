#pragma once

namespace slelab {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace slelab
