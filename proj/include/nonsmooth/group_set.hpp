#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nonsmooth/group.hpp"

namespace nonsmooth {

/// A finite subset of a group, stored as sorted, deduplicated dense indices.
/// Immutable after construction.
class GroupSet {
 public:
  GroupSet() = default;
  GroupSet(GroupSpec spec, std::vector<uint64_t> indices);

  static GroupSet from_elements(const GroupSpec& spec, const std::vector<GroupElement>& elems);
  static GroupSet singleton(const GroupSpec& spec, uint64_t index) { return GroupSet(spec, {index}); }

  const GroupSpec& spec() const { return spec_; }
  std::span<const uint64_t> indices() const { return indices_; }
  const std::vector<uint64_t>& index_vector() const { return indices_; }
  size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  uint64_t operator[](size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  /// Cached: true iff -a is in the set for every member a.
  bool symmetric() const { return symmetric_; }
  bool contains(uint64_t index) const;
  std::optional<size_t> position(uint64_t index) const;
  std::vector<GroupElement> elements() const;

  GroupSet negated() const;
  GroupSet translated(uint64_t shift) const;
  GroupSet unite(const GroupSet& other) const;
  GroupSet intersect(const GroupSet& other) const;
  GroupSet minus(const GroupSet& other) const;
  bool is_subset_of(const GroupSet& other) const;

  friend bool operator==(const GroupSet& a, const GroupSet& b) {
    return a.spec_ == b.spec_ && a.indices_ == b.indices_;
  }

 private:
  GroupSpec spec_;
  std::vector<uint64_t> indices_;
  bool symmetric_ = true;
};

/// A ∪ (−A).
GroupSet symmetrize(const GroupSet& a);

/// Smallest subgroup containing the generators.  Throws CapExceeded when the
/// subgroup would be larger than the dense cap.
GroupSet span(const GroupSpec& spec, const std::vector<GroupElement>& generators);
GroupSet span_indices(const GroupSpec& spec, const std::vector<uint64_t>& generators);

/// A + B and A − B as sets.
GroupSet sumset(const GroupSet& a, const GroupSet& b);
GroupSet difference_set(const GroupSet& a, const GroupSet& b);

/// Packed membership bitmap over the whole group (dense).
class Indicator {
 public:
  Indicator() = default;
  explicit Indicator(const GroupSet& set);
  Indicator(const GroupSpec& spec, std::span<const uint64_t> indices);

  bool test(uint64_t index) const { return (words_[index >> 6] >> (index & 63)) & 1u; }
  void set(uint64_t index) { words_[index >> 6] |= uint64_t{1} << (index & 63); }
  uint64_t order() const { return order_; }

 private:
  std::vector<uint64_t> words_;
  uint64_t order_ = 0;
};

/// index -> position lookup for a fixed set; dense array when the group fits
/// the dense cap, hash map otherwise.
class PositionIndex {
 public:
  explicit PositionIndex(const GroupSet& set);
  /// -1 when absent.
  int64_t find(uint64_t index) const {
    if (!dense_.empty()) return dense_[index];
    auto it = sparse_.find(index);
    return it == sparse_.end() ? -1 : static_cast<int64_t>(it->second);
  }

 private:
  std::vector<int32_t> dense_;
  std::unordered_map<uint64_t, uint32_t> sparse_;
};

/// Fixed-width packed bitset over positions [0, n).  Used for fibers
/// Δ[x] ⊆ Δ, indexed by position in Δ.
class PackedBits {
 public:
  PackedBits() = default;
  explicit PackedBits(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  void set(size_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
  bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  size_t size() const { return n_; }
  size_t count() const;
  size_t and_count(const PackedBits& other) const;
  PackedBits& operator|=(const PackedBits& other);
  std::span<const uint64_t> words() const { return words_; }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace nonsmooth
