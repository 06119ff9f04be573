#include "nonsmooth/group_set.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "nonsmooth/config.hpp"

namespace nonsmooth {

GroupSet::GroupSet(GroupSpec spec, std::vector<uint64_t> indices)
    : spec_(std::move(spec)), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.back() >= spec_.order())
    throw std::out_of_range("set index " + std::to_string(indices_.back()) + " outside " + spec_.to_string());
  symmetric_ = std::all_of(indices_.begin(), indices_.end(),
                           [this](uint64_t a) { return contains(spec_.neg(a)); });
}

GroupSet GroupSet::from_elements(const GroupSpec& spec, const std::vector<GroupElement>& elems) {
  std::vector<uint64_t> idx;
  idx.reserve(elems.size());
  for (const auto& e : elems) idx.push_back(spec.index(e));
  return GroupSet(spec, std::move(idx));
}

bool GroupSet::contains(uint64_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::optional<size_t> GroupSet::position(uint64_t index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return std::nullopt;
  return static_cast<size_t>(it - indices_.begin());
}

std::vector<GroupElement> GroupSet::elements() const {
  std::vector<GroupElement> out;
  out.reserve(size());
  for (uint64_t i : indices_) out.push_back(spec_.element(i));
  return out;
}

GroupSet GroupSet::negated() const {
  std::vector<uint64_t> out;
  out.reserve(size());
  for (uint64_t i : indices_) out.push_back(spec_.neg(i));
  return GroupSet(spec_, std::move(out));
}

GroupSet GroupSet::translated(uint64_t shift) const {
  std::vector<uint64_t> out;
  out.reserve(size());
  for (uint64_t i : indices_) out.push_back(spec_.add(i, shift));
  return GroupSet(spec_, std::move(out));
}

GroupSet GroupSet::unite(const GroupSet& other) const {
  require_same(spec_, other.spec_, "unite");
  std::vector<uint64_t> out;
  std::set_union(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return GroupSet(spec_, std::move(out));
}

GroupSet GroupSet::intersect(const GroupSet& other) const {
  require_same(spec_, other.spec_, "intersect");
  std::vector<uint64_t> out;
  std::set_intersection(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return GroupSet(spec_, std::move(out));
}

GroupSet GroupSet::minus(const GroupSet& other) const {
  require_same(spec_, other.spec_, "minus");
  std::vector<uint64_t> out;
  std::set_difference(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return GroupSet(spec_, std::move(out));
}

bool GroupSet::is_subset_of(const GroupSet& other) const {
  return spec_ == other.spec_ && std::includes(other.begin(), other.end(), begin(), end());
}

GroupSet symmetrize(const GroupSet& a) {
  if (a.symmetric()) return a;
  return a.unite(a.negated());
}

GroupSet span_indices(const GroupSpec& spec, const std::vector<uint64_t>& generators) {
  std::vector<uint64_t> members{0};
  std::unordered_set<uint64_t> seen{0};
  for (uint64_t g : generators) {
    if (g >= spec.order()) throw std::out_of_range("generator outside group");
    if (seen.count(g)) continue;
    // H <- H + <g>: append cosets H + k g until k g falls back into H.
    const std::vector<uint64_t> base = members;
    uint64_t step = g;
    while (!seen.count(step)) {
      if (members.size() + base.size() > dense_cap())
        throw CapExceeded("span: subgroup exceeds dense cap " + std::to_string(dense_cap()));
      for (uint64_t h : base) {
        const uint64_t v = spec.add(h, step);
        if (seen.insert(v).second) members.push_back(v);
      }
      step = spec.add(step, g);
    }
  }
  return GroupSet(spec, std::move(members));
}

GroupSet span(const GroupSpec& spec, const std::vector<GroupElement>& generators) {
  std::vector<uint64_t> idx;
  idx.reserve(generators.size());
  for (const auto& g : generators) idx.push_back(spec.index(g));
  return span_indices(spec, idx);
}

namespace {

GroupSet combine(const GroupSet& a, const GroupSet& b, bool subtract) {
  require_same(a.spec(), b.spec(), subtract ? "difference_set" : "sumset");
  const GroupSpec& spec = a.spec();
  std::vector<uint64_t> rhs(b.begin(), b.end());
  if (subtract)
    for (auto& v : rhs) v = spec.neg(v);
  std::vector<uint64_t> out;
  if (spec.order() <= dense_cap()) {
    Indicator hit(spec, std::span<const uint64_t>{});
    for (uint64_t x : a)
      for (uint64_t y : rhs) hit.set(spec.add(x, y));
    for (uint64_t i = 0; i < spec.order(); ++i)
      if (hit.test(i)) out.push_back(i);
    return GroupSet(spec, std::move(out));
  }
  std::unordered_set<uint64_t> hit;
  for (uint64_t x : a)
    for (uint64_t y : rhs) hit.insert(spec.add(x, y));
  out.assign(hit.begin(), hit.end());
  return GroupSet(spec, std::move(out));
}

}  // namespace

GroupSet sumset(const GroupSet& a, const GroupSet& b) { return combine(a, b, false); }
GroupSet difference_set(const GroupSet& a, const GroupSet& b) { return combine(a, b, true); }

Indicator::Indicator(const GroupSet& set) : Indicator(set.spec(), set.indices()) {}

Indicator::Indicator(const GroupSpec& spec, std::span<const uint64_t> indices)
    : words_((spec.order() + 63) / 64, 0), order_(spec.order()) {
  require_dense(spec.order(), "indicator");
  for (uint64_t i : indices) set(i);
}

PositionIndex::PositionIndex(const GroupSet& set) {
  if (set.spec().order() <= dense_cap()) {
    dense_.assign(set.spec().order(), -1);
    for (size_t p = 0; p < set.size(); ++p) dense_[set[p]] = static_cast<int32_t>(p);
  } else {
    sparse_.reserve(set.size() * 2);
    for (size_t p = 0; p < set.size(); ++p) sparse_.emplace(set[p], static_cast<uint32_t>(p));
  }
}

size_t PackedBits::count() const {
  size_t c = 0;
  for (uint64_t w : words_) c += std::popcount(w);
  return c;
}

size_t PackedBits::and_count(const PackedBits& other) const {
  size_t c = 0;
  const size_t n = std::min(words_.size(), other.words_.size());
  for (size_t i = 0; i < n; ++i) c += std::popcount(words_[i] & other.words_[i]);
  return c;
}

PackedBits& PackedBits::operator|=(const PackedBits& other) {
  for (size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

}  // namespace nonsmooth
