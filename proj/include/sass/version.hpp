#pragma once

namespace sass {
inline constexpr const char* kVersion = "0.1.0";
}
