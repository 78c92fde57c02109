#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "esslab/error.hpp"
#include "esslab/parallel.hpp"

namespace esslab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kKindMismatch: return "kind-mismatch";
    case ErrorKind::kEmptySet: return "empty-set";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kWindow: return "window";
    case ErrorKind::kSupport: return "support";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

std::size_t thread_count() {
  if (const char* env = std::getenv("ESSLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {
// Nested calls run serially inside the worker that issued them.
thread_local bool in_parallel_region = false;
}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t workers = in_parallel_region ? 1 : std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    bool saved = in_parallel_region;
    in_parallel_region = true;
    struct Restore {
      bool& flag;
      bool value;
      ~Restore() { flag = value; }
    } restore{in_parallel_region, saved};
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace esslab
