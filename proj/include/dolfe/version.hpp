#pragma once

namespace dolfe {

inline constexpr const char* kVersion = "0.2.0";

}  // namespace dolfe
