#pragma once

namespace emofuse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace emofuse
