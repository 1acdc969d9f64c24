#include "adaptci/parallel.hpp"

#include "adaptci/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace adaptci {

unsigned resolve_threads(unsigned requested)
{
  if (requested > 0)
    return requested;
  if (const char* env = std::getenv("ADAPTCI_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1)
      throw ValidationError("ADAPTCI_THREADS must be a positive integer, got '" + std::string(env) +
                            "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i)
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first)
          first = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  if (first)
    std::rethrow_exception(first);
}

} // namespace adaptci
