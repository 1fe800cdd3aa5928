#pragma once

namespace downwash {

inline constexpr const char* version = "0.1.0";

}  // namespace downwash
