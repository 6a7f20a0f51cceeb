#include "tubeforge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tubeforge {
namespace {

unsigned env_thread_limit() {
  unsigned threads = 0;
  if (const char* env = std::getenv("TUBEFORGE_THREADS")) {
    try {
      threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      threads = 0;
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

std::atomic<unsigned>& limit_storage() {
  static std::atomic<unsigned> limit{env_thread_limit()};
  return limit;
}

}  // namespace

unsigned thread_limit() { return limit_storage().load(); }

void set_thread_limit(unsigned threads) {
  limit_storage().store(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(thread_limit(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_index = count;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        // Keep the failure of the lowest index so the reported error does
        // not depend on scheduling.
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tubeforge
