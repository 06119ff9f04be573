#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace nonsmooth {

// Wide accumulator for energies and other quadruple-scale counts.  Checked:
// any overflow throws std::overflow_error instead of wrapping.
using Exact = boost::multiprecision::checked_uint256_t;

// Arbitrary precision, used for exact rational comparisons (E_4^3 vs E_8 |A|^2).
using BigInt = boost::multiprecision::cpp_int;

using u128 = unsigned __int128;

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

inline uint64_t checked_add(uint64_t a, uint64_t b) {
  uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("count accumulator overflow (64-bit)");
  return out;
}

inline uint64_t checked_mul(uint64_t a, uint64_t b) {
  uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("count accumulator overflow (64-bit)");
  return out;
}

inline u128 checked_add(u128 a, u128 b) {
  u128 out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("count accumulator overflow (128-bit)");
  return out;
}

inline u128 checked_mul(u128 a, u128 b) {
  u128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("count accumulator overflow (128-bit)");
  return out;
}

inline Exact to_exact(u128 v) {
  Exact hi = static_cast<uint64_t>(v >> 64);
  return (hi << 64) + Exact(static_cast<uint64_t>(v));
}

inline std::string to_decimal(const Exact& v) { return v.str(); }

inline Exact exact_from_decimal(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("not a decimal integer: '" + s + "'");
  return Exact(s);
}

inline long double log_exact(const Exact& v) {
  // Shift large values down so the conversion to long double stays exact
  // enough; log of a 256-bit integer needs ~64 significant bits.
  if (v == 0) return -INFINITY;
  const unsigned bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 64) return std::log(static_cast<long double>(v.convert_to<uint64_t>()));
  const unsigned shift = bits - 64;
  const uint64_t top = static_cast<uint64_t>(v >> shift);
  return std::log(static_cast<long double>(top)) + shift * std::log(2.0L);
}

// log_base(value); base must be > 1.
inline long double log_base(const Exact& v, long double base) { return log_exact(v) / std::log(base); }

inline BigInt to_big(const Exact& v) { return BigInt(v.str()); }

}  // namespace nonsmooth
