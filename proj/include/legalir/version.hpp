#pragma once

namespace legalir {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr int kPairFormatVersion = 1;

}  // namespace legalir
