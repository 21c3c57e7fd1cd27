#ifndef USCO_UTIL_HPP
#define USCO_UTIL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace usco {

std::vector<double> linspace(double start, double stop, std::size_t count);

// Number of worker threads: USCO_THREADS when set (>= 1), otherwise the
// hardware concurrency.
unsigned thread_count();

// Static-partition parallel loop over [0, n). The body must be safe to run
// concurrently for distinct indices. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Fixed scientific notation with 12 significant digits, for diffable files.
std::string fmt_sci(double x);

std::size_t next_pow2(std::size_t n);

}  // namespace usco

#endif
