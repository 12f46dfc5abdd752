#pragma once

namespace jscc {

/// Version tag recorded in run manifests so result files name the code
/// that produced them.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace jscc
