// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/util.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wrom {

std::string fmt_double(double v) {
  char buf[40];
  // Shortest precision that round-trips keeps files readable and is still
  // fully deterministic.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v)
      break;
  }
  return buf;
}

void parallel_for(int n, const std::function<void(int)> &fn) {
  if (n <= 0)
    return;
  unsigned hw = std::thread::hardware_concurrency();
  int n_threads = static_cast<int>(hw == 0 ? 1 : hw);
  if (n_threads > n)
    n_threads = n;
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i)
      fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<size_t>(n_threads));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    int lo = static_cast<int>(static_cast<long long>(n) * t / n_threads);
    int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / n_threads);
    threads.emplace_back([&, lo, hi, t]() {
      try {
        for (int i = lo; i < hi; ++i)
          fn(i);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto &th : threads)
    th.join();
  // Rethrow the failure from the lowest chunk so error reporting does not
  // depend on thread scheduling.
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace wrom
