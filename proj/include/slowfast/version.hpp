#pragma once

namespace slowfast {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace slowfast
