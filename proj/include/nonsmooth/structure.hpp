#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonsmooth/energy.hpp"

namespace nonsmooth {

/// Δ together with its representation function and E_4, computed once and
/// shared by everything that works on structures inside Δ.
struct BaseAnalysis {
  GroupSet delta;
  CountVector r;
  Exact e4 = 0;
  double tau = 0;  // E_4 = M^{2+τ}

  uint64_t size() const { return delta.size(); }
  long double log_m() const { return std::log(static_cast<long double>(delta.size())); }
  /// log_M of a positive count.
  double exponent(const Exact& v) const { return static_cast<double>(log_exact(v) / log_m()); }
};

/// Throws when Δ has fewer than two elements.
BaseAnalysis analyze_base(const GroupSet& delta, ExactKernel kernel = ExactKernel::automatic);

/// (G, D): G = {(a, b) ∈ Δ² : a − b ∈ D}, every x ∈ D with v <= r(x) < 2v.
struct AdditiveStructure {
  GroupSet base;
  GroupSet D;
  uint64_t bucket_lo = 0;
  double tau = 0;
  double height = 0;  // |G| = M^{2-α}
  Exact graph_size = 0;
  Exact graph_energy = 0;
};

/// Build a structure from an explicit D; computes |G|, E(G), α, τ.
AdditiveStructure make_structure(const BaseAnalysis& base, std::vector<uint64_t> d, uint64_t bucket_lo);

struct BucketInfo {
  uint64_t lo = 0;  // band [lo, 2 lo)
  uint64_t count = 0;
  Exact mass = 0;  // Σ r(x)^2 over the band, x != 0
};

struct FindResult {
  AdditiveStructure structure;
  std::vector<BucketInfo> buckets;  // ascending lo; nonempty bands only
  Exact bound = 0;                  // (E_4 - r(0)^2) / (⌈log_2 M^2⌉ + 1), rounded down
  double guarantee_ratio = 0;       // E(G) (⌈log_2 M^2⌉ + 1) / (E_4 - r(0)^2)
  bool guarantee_ok = false;
  bool zero_admitted = false;
  std::optional<uint64_t> max_popularity;  // filled when M^2 is within the dense cap
};

/// ⌈log_2 M^2⌉ + 1, the number of dyadic bands a count in [1, M^2] can fall into.
unsigned dyadic_band_count(uint64_t m);

/// Dyadic pigeonhole of r over x != 0, selecting the band with the largest
/// Σ r(x)^2 (ties to larger v).  0 joins D when r(0) = M lies in the band.
FindResult find_structure(const BaseAnalysis& base);

struct EnforceResult {
  AdditiveStructure structure;
  unsigned rounds = 0;
  bool changed = false;
  double threshold = 0;      // (1-τ)/2 + 2/log_2 M
  bool energy_ok = true;     // E(G') >= E(G)/(⌈log_2 M^2⌉+1)
};

/// Lower the height by pigeonholing the dual graph {(a, c) : a − b = c − d,
/// (a, b), (c, d) ∈ G} until the height bound holds or stops improving.
EnforceResult enforce_low_height(const BaseAnalysis& base, const AdditiveStructure& s);

/// Exponents are serialized with 9 decimals, so a relation among three stored
/// values can be off by 1.5e-9 after a round trip.
inline constexpr double kExponentTolerance = 2e-9;

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    pass = false;
    violations.push_back(std::move(what));
  }
};

ValidationReport validate_structure(const GroupSet& delta, const AdditiveStructure& s);
ValidationReport validate_structure(const BaseAnalysis& base, const AdditiveStructure& s);

namespace detail {
/// Bucket candidates (x != 0) by floor(log_2 r(x)); return the band whose
/// weight sum is largest (ties to larger v).  Returns the chosen D (with 0
/// re-admitted when r(0) lies in the band) and v.  Empty D when no candidate.
struct BandChoice {
  std::vector<uint64_t> d;
  uint64_t lo = 0;
  Exact weight = 0;
  bool zero_admitted = false;
};
BandChoice choose_band(const BaseAnalysis& base, const std::vector<uint64_t>& candidates,
                       const std::vector<Exact>& weights);
}  // namespace detail

}  // namespace nonsmooth
