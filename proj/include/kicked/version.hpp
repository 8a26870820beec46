#pragma once

namespace kicked {
inline constexpr const char* version = "0.1.0";
}
