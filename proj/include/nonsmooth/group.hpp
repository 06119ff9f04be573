#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nonsmooth {

class SpecMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GroupSpec;

/// An element of a finite abelian group Z = Z/n_1 x ... x Z/n_k, held as
/// its coordinate vector.  Arithmetic goes through the owning GroupSpec.
struct GroupElement {
  std::vector<uint64_t> coords;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// A character index xi; pairs with x through phase(x, xi) = sum x_i xi_i / n_i.
struct DualElement {
  std::vector<uint64_t> coords;

  friend bool operator==(const DualElement&, const DualElement&) = default;
};

/// Exact phase p/q in [0, 1), always reduced.
struct Phase {
  uint64_t num = 0;
  uint64_t den = 1;

  std::complex<double> character() const;
  friend bool operator==(const Phase&, const Phase&) = default;
};

/// Finite abelian group as an ordered product of cyclic factors.
///
/// Elements are identified with a dense index in [0, |Z|) via the mixed-radix
/// little-endian map index(x) = sum_i x_i * prod_{j<i} n_j.  Every count
/// vector in the library is keyed by this index.  Two specs are equal iff
/// their factor lists are equal; no isomorphism normalisation is attempted.
class GroupSpec {
 public:
  GroupSpec() = default;
  explicit GroupSpec(std::vector<uint64_t> factors);

  /// Parse the product grammar, e.g. "Z2^12 x Z3^4 x Z/1000".
  static GroupSpec parse(std::string_view text);
  /// Canonical spelling; parse(to_string()) == *this.
  std::string to_string() const;

  const std::vector<uint64_t>& factors() const { return factors_; }
  size_t rank() const { return factors_.size(); }
  uint64_t order() const { return order_; }
  /// True when every factor is 2 (Z_2^n); indices then add by XOR.
  bool elementary_two() const { return elementary_two_; }

  uint64_t index(const GroupElement& x) const;
  GroupElement element(uint64_t index) const;
  GroupElement zero() const { return GroupElement{std::vector<uint64_t>(rank(), 0)}; }
  bool contains(const GroupElement& x) const;

  GroupElement add(const GroupElement& x, const GroupElement& y) const;
  GroupElement neg(const GroupElement& x) const;
  GroupElement sub(const GroupElement& x, const GroupElement& y) const;

  // Index-level arithmetic.
  uint64_t add(uint64_t x, uint64_t y) const;
  uint64_t neg(uint64_t x) const;
  uint64_t sub(uint64_t x, uint64_t y) const { return add(x, neg(y)); }

  Phase phase(const GroupElement& x, const DualElement& xi) const;
  DualElement dual(uint64_t index) const;

  /// dst[y + shift] += src[y] for every y; both spans have length order().
  template <typename T>
  void accumulate_shifted(std::span<const T> src, std::span<T> dst, uint64_t shift) const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.factors_ == b.factors_; }

 private:
  void check(const GroupElement& x) const;

  std::vector<uint64_t> factors_;
  std::vector<uint64_t> strides_;
  uint64_t order_ = 1;
  bool elementary_two_ = true;
};

void require_same(const GroupSpec& a, const GroupSpec& b, const char* what);

template <typename T>
void GroupSpec::accumulate_shifted(std::span<const T> src, std::span<T> dst, uint64_t shift) const {
  const uint64_t n = order_;
  if (elementary_two_) {
    for (uint64_t y = 0; y < n; ++y) dst[y ^ shift] += src[y];
    return;
  }
  const size_t k = rank();
  const uint64_t n0 = factors_[0];
  const uint64_t s0 = shift % n0;
  // Outer odometer over coordinates 1..k-1 tracks the shifted target block.
  std::vector<uint64_t> outer(k, 0), shift_c(k, 0);
  uint64_t rest = shift;
  for (size_t i = 0; i < k; ++i) {
    shift_c[i] = rest % factors_[i];
    rest /= factors_[i];
  }
  uint64_t target_block = 0;
  for (size_t i = 1; i < k; ++i) target_block += shift_c[i] * strides_[i];
  for (uint64_t block = 0; block < n; block += n0) {
    const T* s = src.data() + block;
    T* d = dst.data() + target_block;
    const uint64_t split = n0 - s0;
    for (uint64_t x = 0; x < split; ++x) d[x + s0] += s[x];
    for (uint64_t x = split; x < n0; ++x) d[x - split] += s[x];
    // Advance odometer on dims >= 1 and update the target block incrementally.
    for (size_t i = 1; i < k; ++i) {
      const uint64_t old_t = (outer[i] + shift_c[i]) % factors_[i];
      ++outer[i];
      if (outer[i] < factors_[i]) {
        const uint64_t new_t = (outer[i] + shift_c[i]) % factors_[i];
        target_block = target_block - old_t * strides_[i] + new_t * strides_[i];
        break;
      }
      outer[i] = 0;
      const uint64_t new_t = shift_c[i];
      target_block = target_block - old_t * strides_[i] + new_t * strides_[i];
    }
  }
}

}  // namespace nonsmooth
