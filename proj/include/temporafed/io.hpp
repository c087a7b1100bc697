#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace temporafed {

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Worker count: hardware concurrency capped by TEMPORAFED_THREADS.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed-point rendering used by every text artifact.
std::string format_fixed(double value, int decimals);

}  // namespace temporafed
