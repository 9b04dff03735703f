#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kgcoh::app {

// Worker count for a requested cap; 0 means all available cores.
unsigned resolve_threads(unsigned requested);

// Calls fn(i) for i in [0, count) on up to `threads` workers. Results land
// in slot i, so output order never depends on scheduling. The first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned threads, F&& fn) {
  std::vector<T> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace kgcoh::app
