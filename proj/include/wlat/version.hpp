#pragma once

namespace wlat {
inline constexpr const char* kVersion = "0.1.0";
}
