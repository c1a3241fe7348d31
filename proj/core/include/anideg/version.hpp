#pragma once

namespace anideg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace anideg
