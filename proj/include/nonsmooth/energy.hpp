#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonsmooth/exact.hpp"
#include "nonsmooth/group_set.hpp"

namespace nonsmooth {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact nonnegative integer function on the group, keyed by dense index.
struct CountVector {
  GroupSpec spec;
  std::vector<uint64_t> counts;

  uint64_t operator[](uint64_t index) const { return counts[index]; }
  uint64_t at(const GroupElement& x) const { return counts[spec.index(x)]; }
  Exact total() const;
  Exact sum_squares() const;
  size_t support_size() const;
};

enum class EnergyMethod { exact, spectral, brute };
/// Which exact algorithm backs the "exact" method.  automatic picks the
/// cheaper of sparse-dense folding and (on Z_2^n) the integer Walsh-Hadamard
/// transform; both are exact.
enum class ExactKernel { automatic, convolution, walsh };

std::string to_string(EnergyMethod m);
EnergyMethod parse_energy_method(const std::string& s);
std::string to_string(ExactKernel k);
ExactKernel parse_exact_kernel(const std::string& s);

inline constexpr unsigned kDefaultMaxFold = 4;
inline constexpr uint64_t kDefaultTupleBudget = 1'000'000'000;

/// r_A(x) = #{(a, b) in A^2 : a - b = x}.
CountVector rep_function(const GroupSet& a, ExactKernel kernel = ExactKernel::automatic);

/// (1_B * 1_C)(x) = #{(b, c) in B x C : b + c = x}.
CountVector convolve_sets(const GroupSet& b, const GroupSet& c, ExactKernel kernel = ExactKernel::automatic);

/// g_m(x) = #{(a_1..a_m) in A^m : a_1 + ... + a_m = x}.  Throws OverflowError
/// when a count could exceed 64 bits.
CountVector sum_count(const GroupSet& a, unsigned m, ExactKernel kernel = ExactKernel::automatic,
                      unsigned max_fold = kDefaultMaxFold);

/// E_{2m}(A) = sum_x g_m(x)^2, computed exactly.
Exact energy_exact(const GroupSet& a, unsigned order, ExactKernel kernel = ExactKernel::automatic);

/// Verification oracle: enumerate all m-tuples by coordinate arithmetic, hash
/// their sums.  Refuses (BudgetExceeded) when M^m > tuple_budget.
Exact energy_brute(const GroupSet& a, unsigned order, uint64_t tuple_budget = kDefaultTupleBudget);

struct SpectralEnergy {
  long double value = 0;
  long double residual = 0;     // |value - nearest integer|
  std::optional<Exact> rounded;  // set when residual < 0.25 and value is in exact double range
};

/// E_{2m}(A) = |Z|^{2m-1} sum_xi |1̂_A(xi)|^{2m} through the floating transform.
SpectralEnergy energy_spectral(const GroupSet& a, unsigned order);

struct EnergyResult {
  unsigned order = 0;
  EnergyMethod method = EnergyMethod::exact;
  Exact value = 0;  // spectral: rounded value when available, else truncated
  std::optional<SpectralEnergy> spectral;
};

EnergyResult energy(const GroupSet& a, unsigned order, EnergyMethod method,
                    ExactKernel kernel = ExactKernel::automatic, uint64_t tuple_budget = kDefaultTupleBudget);

struct HolderReport {
  Exact e4 = 0;
  Exact e8 = 0;
  uint64_t size = 0;
  BigInt lower_numerator;  // lower bound E_4^3 / |A|^2 as a fraction
  BigInt lower_denominator;
  BigInt upper;            // |A|^4 E_4
  bool pass = false;
  bool lower_equality = false;  // E_8 |A|^2 == E_4^3
};

HolderReport holder_check(const GroupSet& a, ExactKernel kernel = ExactKernel::automatic);
HolderReport holder_check(uint64_t size, const Exact& e4, const Exact& e8);

/// sigma-hat = (log E_8 - 3 log E_4 + 2 log M) / log M.
double smoothing_exponent(const GroupSet& a, ExactKernel kernel = ExactKernel::automatic);
double smoothing_exponent(uint64_t size, const Exact& e4, const Exact& e8);

struct AsymEnergy {
  Exact difference_form = 0;  // E(B,C) = #{b1 - c1 = b2 - c2}
  Exact sum_form = 0;         // #{b1 + c1 = b2 + c2}
};

AsymEnergy asym_energy(const GroupSet& b, const GroupSet& c, ExactKernel kernel = ExactKernel::automatic);

/// #{(b, c, d) in A^3 : b + c - d = a}.
uint64_t popularity(uint64_t a, const GroupSet& set);
/// Popularity of every member of A, in member order, given r = rep_function(A).
std::vector<uint64_t> popularity_all(const GroupSet& set, const CountVector& rep);

namespace detail {
/// In-place integer Walsh-Hadamard transform (unnormalised).
void walsh_hadamard(std::span<int64_t> data);
void walsh_hadamard_wrapping(std::span<u128> data);
}  // namespace detail

}  // namespace nonsmooth
