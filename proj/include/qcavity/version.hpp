#pragma once

namespace qcavity {
inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kLibraryName = "qcavity";
}
