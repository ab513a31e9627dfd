#include "swarmcov/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace swarmcov {

int default_thread_count()
{
  if (const char* env = std::getenv("SWARMCOV_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1)
        return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
  if (n == 0)
    return;
  std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  auto run_chunk = [&](std::size_t w) {
    std::size_t begin = n * w / workers;
    std::size_t end = n * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
      pool.emplace_back(run_chunk, w);
    run_chunk(0);
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

}  // namespace swarmcov
