#pragma once

namespace ssc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ssc
