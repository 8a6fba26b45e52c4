#pragma once

#include <functional>

namespace zeno {

// Runs fn(0), …, fn(count−1) on up to `workers` threads.  Iterations must be
// independent; exceptions from any iteration are collected and the first one
// rethrown after all threads join.  workers ≤ 1 runs inline.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace zeno
