#include "usco/util.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace usco {

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  if (count == 0) return out;
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(start + step * static_cast<double>(i));
  out.back() = stop;
  return out;
}

unsigned thread_count() {
  if (const char* env = std::getenv("USCO_THREADS")) {
    const long n = std::atol(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return buf;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace usco
