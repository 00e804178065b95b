#pragma once

namespace piecevec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace piecevec
