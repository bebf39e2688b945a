#pragma once

namespace symbiosim {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace symbiosim
