#pragma once

namespace placegen {

inline constexpr const char* kCodeVersion = "0.1.0";

} // namespace placegen
