#include "nonsmooth/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace nonsmooth {
namespace {

uint64_t initial_cap() {
  if (const char* env = std::getenv("NONSMOOTH_DENSE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (end != env && *end == '\0' && v >= 1 && v <= kMaxDenseCap) return v;
  }
  return kDefaultDenseCap;
}

std::atomic<uint64_t> g_cap{initial_cap()};
std::atomic<int> g_threads{1};

}  // namespace

uint64_t dense_cap() { return g_cap.load(); }

void set_dense_cap(uint64_t cap) {
  if (cap < 1 || cap > kMaxDenseCap)
    throw std::invalid_argument("dense cap must be in [1, 2^26], got " + std::to_string(cap));
  g_cap.store(cap);
}

void require_dense(uint64_t order, const char* what) {
  if (order > dense_cap())
    throw CapExceeded(std::string(what) + ": group order " + std::to_string(order) +
                      " exceeds dense cap " + std::to_string(dense_cap()));
}

int threads() { return g_threads.load(); }

void set_threads(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads.store(n);
  omp_set_num_threads(n);
}

}  // namespace nonsmooth
