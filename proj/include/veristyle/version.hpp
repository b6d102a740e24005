#pragma once

namespace veristyle {

inline constexpr const char* kVersion = "0.1.0";

}
