#include "nonsmooth/group.hpp"

#include <cctype>
#include <numeric>
#include <sstream>

namespace nonsmooth {

std::complex<double> Phase::character() const {
  const double angle = 2.0 * M_PI * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

GroupSpec::GroupSpec(std::vector<uint64_t> factors) : factors_(std::move(factors)) {
  strides_.reserve(factors_.size());
  order_ = 1;
  elementary_two_ = true;
  for (uint64_t n : factors_) {
    if (n < 2) throw std::invalid_argument("cyclic factor must be >= 2, got " + std::to_string(n));
    strides_.push_back(order_);
    if (__builtin_mul_overflow(order_, n, &order_))
      throw std::invalid_argument("group order does not fit in 64 bits");
    elementary_two_ = elementary_two_ && n == 2;
  }
}

namespace {

uint64_t parse_uint(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("group spec: expected a number in '" + std::string(whole) + "'");
  uint64_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("group spec: bad number '" + std::string(s) + "' in '" + std::string(whole) + "'");
    if (__builtin_mul_overflow(v, uint64_t{10}, &v) || __builtin_add_overflow(v, uint64_t(c - '0'), &v))
      throw std::invalid_argument("group spec: number too large in '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

GroupSpec GroupSpec::parse(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  if (compact.empty()) throw std::invalid_argument("group spec: empty");

  std::vector<uint64_t> factors;
  size_t pos = 0;
  while (pos <= compact.size()) {
    size_t next = compact.find('x', pos);
    if (next == std::string::npos) next = compact.size();
    std::string_view atom(compact.data() + pos, next - pos);
    if (atom.size() < 2 || atom[0] != 'Z')
      throw std::invalid_argument("group spec: bad atom '" + std::string(atom) + "' in '" + std::string(text) + "'");
    if (atom[1] == '/') {
      factors.push_back(parse_uint(atom.substr(2), text));
    } else {
      const size_t caret = atom.find('^');
      const uint64_t n = parse_uint(atom.substr(1, caret == std::string_view::npos ? std::string_view::npos : caret - 1), text);
      const uint64_t k = caret == std::string_view::npos ? 1 : parse_uint(atom.substr(caret + 1), text);
      if (k == 0 || k > 64) throw std::invalid_argument("group spec: bad exponent in '" + std::string(text) + "'");
      factors.insert(factors.end(), k, n);
    }
    pos = next + 1;
  }
  return GroupSpec(std::move(factors));
}

std::string GroupSpec::to_string() const {
  std::ostringstream out;
  for (size_t i = 0; i < factors_.size();) {
    size_t j = i;
    while (j < factors_.size() && factors_[j] == factors_[i]) ++j;
    if (i > 0) out << " x ";
    if (j - i == 1) out << "Z/" << factors_[i];
    else out << "Z" << factors_[i] << "^" << (j - i);
    i = j;
  }
  return out.str();
}

void GroupSpec::check(const GroupElement& x) const {
  if (!contains(x)) throw SpecMismatch("element does not belong to " + to_string());
}

bool GroupSpec::contains(const GroupElement& x) const {
  if (x.coords.size() != rank()) return false;
  for (size_t i = 0; i < rank(); ++i)
    if (x.coords[i] >= factors_[i]) return false;
  return true;
}

uint64_t GroupSpec::index(const GroupElement& x) const {
  check(x);
  uint64_t idx = 0;
  for (size_t i = 0; i < rank(); ++i) idx += x.coords[i] * strides_[i];
  return idx;
}

GroupElement GroupSpec::element(uint64_t idx) const {
  if (idx >= order_) throw std::out_of_range("index " + std::to_string(idx) + " outside " + to_string());
  GroupElement x{std::vector<uint64_t>(rank())};
  for (size_t i = 0; i < rank(); ++i) {
    x.coords[i] = idx % factors_[i];
    idx /= factors_[i];
  }
  return x;
}

GroupElement GroupSpec::add(const GroupElement& x, const GroupElement& y) const {
  check(x);
  check(y);
  GroupElement out{std::vector<uint64_t>(rank())};
  for (size_t i = 0; i < rank(); ++i) {
    const uint64_t s = x.coords[i] + y.coords[i];
    out.coords[i] = s >= factors_[i] ? s - factors_[i] : s;
  }
  return out;
}

GroupElement GroupSpec::neg(const GroupElement& x) const {
  check(x);
  GroupElement out{std::vector<uint64_t>(rank())};
  for (size_t i = 0; i < rank(); ++i) out.coords[i] = x.coords[i] == 0 ? 0 : factors_[i] - x.coords[i];
  return out;
}

GroupElement GroupSpec::sub(const GroupElement& x, const GroupElement& y) const { return add(x, neg(y)); }

uint64_t GroupSpec::add(uint64_t x, uint64_t y) const {
  if (elementary_two_) return x ^ y;
  uint64_t out = 0;
  for (size_t i = 0; i < rank(); ++i) {
    const uint64_t n = factors_[i];
    uint64_t s = x % n + y % n;
    if (s >= n) s -= n;
    out += s * strides_[i];
    x /= n;
    y /= n;
  }
  return out;
}

uint64_t GroupSpec::neg(uint64_t x) const {
  if (elementary_two_) return x;
  uint64_t out = 0;
  for (size_t i = 0; i < rank(); ++i) {
    const uint64_t n = factors_[i];
    const uint64_t c = x % n;
    out += (c == 0 ? 0 : n - c) * strides_[i];
    x /= n;
  }
  return out;
}

Phase GroupSpec::phase(const GroupElement& x, const DualElement& xi) const {
  check(x);
  if (xi.coords.size() != rank()) throw SpecMismatch("dual element rank mismatch for " + to_string());
  uint64_t den = 1;
  for (uint64_t n : factors_) den = std::lcm(den, n);
  // Sum of (x_i xi_i mod n_i) * (den / n_i), reduced mod den.
  uint64_t num = 0;
  for (size_t i = 0; i < rank(); ++i) {
    if (xi.coords[i] >= factors_[i]) throw SpecMismatch("dual coordinate out of range for " + to_string());
    const unsigned __int128 prod = static_cast<unsigned __int128>(x.coords[i]) * xi.coords[i] % factors_[i];
    const unsigned __int128 term = prod * (den / factors_[i]);
    num = static_cast<uint64_t>((num + term) % den);
  }
  const uint64_t g = std::gcd(num, den);
  return Phase{num / g, den / g};
}

DualElement GroupSpec::dual(uint64_t idx) const { return DualElement{element(idx).coords}; }

void require_same(const GroupSpec& a, const GroupSpec& b, const char* what) {
  if (!(a == b)) throw SpecMismatch(std::string(what) + ": group mismatch (" + a.to_string() + " vs " + b.to_string() + ")");
}

}  // namespace nonsmooth
