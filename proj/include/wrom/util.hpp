// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#ifndef WROM_UTIL_HPP
#define WROM_UTIL_HPP

#include <cstdint>
#include <functional>
#include <string>

namespace wrom {

/// Format a double for CSV output: shortest decimal form that round-trips
/// ("%.17g" trimmed). Deterministic for a given binary, no locale effects.
std::string fmt_double(double v);

/// Run fn(i) for i in [0, n). Chunked over std::thread; each index must write
/// only to its own output slot so results are order-independent. The first
/// exception (lowest chunk) is rethrown after all threads join.
void parallel_for(int n, const std::function<void(int)> &fn);

/// 53-bit uniform double in [0, 1) from a raw 64-bit generator draw.
inline double uniform01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace wrom

#endif
