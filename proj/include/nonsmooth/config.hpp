#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nonsmooth {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint64_t kDefaultDenseCap = uint64_t{1} << 22;
inline constexpr uint64_t kMaxDenseCap = uint64_t{1} << 26;

// Dense-size cap for operations that allocate one slot per group element.
// Initialised from NONSMOOTH_DENSE_CAP when set.
uint64_t dense_cap();
void set_dense_cap(uint64_t cap);
void require_dense(uint64_t order, const char* what);

// Number of worker threads for data-parallel kernels.  All reductions are
// exact-integer or fixed-chunk, so results do not depend on this value.
int threads();
void set_threads(int n);

class ScopedDenseCap {
 public:
  explicit ScopedDenseCap(uint64_t cap) : saved_(dense_cap()) { set_dense_cap(cap); }
  ~ScopedDenseCap() { set_dense_cap(saved_); }
  ScopedDenseCap(const ScopedDenseCap&) = delete;
  ScopedDenseCap& operator=(const ScopedDenseCap&) = delete;

 private:
  uint64_t saved_;
};

}  // namespace nonsmooth
