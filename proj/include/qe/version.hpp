#pragma once

namespace qe {
inline constexpr const char* kVersion = "1.0.0";
}
