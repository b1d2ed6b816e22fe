#pragma once

namespace pepsim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace pepsim
