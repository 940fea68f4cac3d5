#pragma once

namespace specamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace specamp
