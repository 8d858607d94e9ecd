#pragma once

namespace levymix {

inline constexpr const char* engine_version = "0.1.0";

}  // namespace levymix
