// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wrom/util.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

TEST_CASE("fmt_double round-trips exactly") {
  const double xs[] = {0.0,    -0.0,   1.0,       0.1,      1.0 / 3.0,
                       -2.5e8, 1e-300, 1.5e308,   -7.25,    3.141592653589793,
                       1e16,   1e-16,  0.49999999999999994};
  for (double x : xs) {
    const std::string s = wrom::fmt_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("fmt_double is stable across calls") {
  CHECK(wrom::fmt_double(0.1) == wrom::fmt_double(0.1));
  CHECK(wrom::fmt_double(1.0) == "1");
}

TEST_CASE("parallel_for covers every index once") {
  const int n = 1037;
  std::vector<std::atomic<int>> hits(n);
  wrom::parallel_for(n, [&](int i) { hits[static_cast<size_t>(i)]++; });
  for (const auto &h : hits)
    CHECK(h.load() == 1);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(wrom::parallel_for(64,
                                     [](int i) {
                                       if (i == 17)
                                         throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
}

TEST_CASE("parallel_for handles zero and one iteration") {
  int count = 0;
  wrom::parallel_for(0, [&](int) { count++; });
  CHECK(count == 0);
  wrom::parallel_for(1, [&](int) { count++; });
  CHECK(count == 1);
}

TEST_CASE("uniform01_from_bits lands in [0,1)") {
  CHECK(wrom::uniform01_from_bits(0) == 0.0);
  const double top = wrom::uniform01_from_bits(~0ull);
  CHECK(top < 1.0);
  CHECK(top > 0.999999999);
}
