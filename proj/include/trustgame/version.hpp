#pragma once

namespace trustgame {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trustgame
