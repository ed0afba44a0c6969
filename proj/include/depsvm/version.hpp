#pragma once

namespace depsvm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace depsvm
