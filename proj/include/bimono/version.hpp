#pragma once

namespace bimono {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bimono
