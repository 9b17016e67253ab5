#pragma once

namespace wavedge {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wavedge
