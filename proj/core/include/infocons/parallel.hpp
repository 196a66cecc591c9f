#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace infocons {

/// Parallel-map capability handed to the numerical modules.
///
/// Work is split into fixed-size chunks whose layout depends only on the
/// problem size and the chunk size, never on the thread count. Callers that
/// reduce write one partial per chunk and merge in chunk order, which keeps
/// results bit-identical for any number of threads.
class Executor {
 public:
  explicit Executor(std::size_t threads = 1);

  std::size_t threads() const noexcept { return threads_; }

  /// Calls `body(chunk_index, begin, end)` for every chunk of [0, n).
  /// If several chunks throw, the exception of the lowest chunk index is
  /// rethrown after all workers finish.
  void for_chunks(std::size_t n, std::size_t chunk_size,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body) const;

  /// Convenience: `body(i)` for every i in [0, n).
  void for_each(std::size_t n, const std::function<void(std::size_t)>& body,
                std::size_t chunk_size = 256) const;

  static std::size_t chunk_count(std::size_t n, std::size_t chunk_size) noexcept {
    return chunk_size == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
  }

 private:
  std::size_t threads_;
};

/// Shared single-threaded executor for callers that do not care.
const Executor& serial_executor();

}  // namespace infocons
