#pragma once

namespace specmeas {
inline constexpr const char* kVersion = "0.1.0";
}
