#pragma once

#include <vector>

#include "nonsmooth/energy.hpp"

namespace nonsmooth {

/// |1̂_A(ξ)|^2 for every ξ, with 1̂_A(ξ) = |Z|^{-1} Σ_x 1_A(x) e^{2πi<ξ,x>}.
/// values is keyed by the canonical index of ξ.
struct SpectrumTable {
  GroupSpec spec;
  std::vector<double> values;

  /// |Z| Σ_ξ values(ξ); equals |A| by Plancherel.
  long double plancherel_sum() const;
};

SpectrumTable spectrum(const GroupSet& a);

}  // namespace nonsmooth
