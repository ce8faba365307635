#pragma once

namespace opialtk {

inline constexpr const char* kVersion = "0.1.0";

} // namespace opialtk
