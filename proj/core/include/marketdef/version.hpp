#pragma once

namespace marketdef {

inline constexpr const char* kVersion = "0.1.0";

} // namespace marketdef
