#pragma once

namespace lploc {

inline constexpr const char* kVersion = "lploc 0.1.0";

}  // namespace lploc
