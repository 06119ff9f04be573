#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonsmooth/bsg.hpp"
#include "nonsmooth/comity.hpp"

namespace nonsmooth {

struct PruneResult {
  GroupSet set;       // Δ̃
  GroupSet removed;   // symmetric
  double c_pop = 0;
  Exact threshold_numerator = 0;  // remove a when popularity(a) M >= C_pop E_4
  uint64_t max_popularity = 0;
  Exact e4_before = 0;
  Exact e4_after = 0;
};

inline constexpr double kDefaultCPop = 8.0;

PruneResult prune_popular(const GroupSet& delta, double c_pop = kDefaultCPop);

struct Schedule {
  std::vector<double> sigma;       // σ_j
  std::vector<double> mu_tilde;    // comity targets μ̃_j
  unsigned max_iters = 0;          // ⌈2/ν*⌉
  unsigned saturated_from = 0;     // first j held rather than computed
};

/// μ̃_j = C / ln(1/σ_j), σ_{j+1} = C μ̃_j.  Once σ leaves (0, 1) the target is
/// held at max(previous, ν*).
Schedule schedule(double sigma0, double nu_star, double c = 2.0);

struct TraceRow {
  unsigned step = 0;
  unsigned block = 0;
  std::string phase;  // structure | comity | sideways | select | bsg
  double alpha = 0;
  double mu = NAN;
  double nu = NAN;
  uint64_t d_size = 0;
  Exact graph_energy = 0;
  std::string outcome;
};

struct Block {
  unsigned index = 0;
  GroupSet H, X, B;
  double alpha = 0;
  uint64_t diff_size = 0;   // |H − H|
  double doubling_ratio = 0;
  BsgVerdict verdict = BsgVerdict::fail;
  uint64_t x = 0, a = 0;    // the selected pair
};

struct ExtractParams {
  double nu_star = 0.25;
  double c = 2.0;
  std::optional<double> sigma0;  // default: measured σ̂, clamped
  uint64_t selection_cap = 100000;
  double selection_work = 268435456.0;  // 2^28
  CertificateOptions cert{1'000'000, 2147483648.0};
  BsgParams bsg{};
};

struct ExtractResult {
  std::optional<Block> block;
  std::string stall_reason;  // set when block is empty
  std::vector<TraceRow> trace;
};

ExtractResult extract_block(const GroupSet& delta, const ExtractParams& params, unsigned block_index = 0,
                            unsigned step_offset = 0);

struct DecomposeParams {
  ExtractParams extract{};
  double coverage = 0.5;
  double c_pop = kDefaultCPop;
};

struct Decomposition {
  GroupSet input;
  PruneResult pruned;
  std::vector<Block> blocks;
  GroupSet residual;
  double alpha_mode = 0;
  std::vector<unsigned> alpha_band;  // blocks in the selected factor-4 band
  std::vector<TraceRow> trace;
  std::vector<std::string> notes;
  std::string stop_reason;
  double coverage = 0;  // |∪ B_j| / |Δ̃|
};

Decomposition decompose(const GroupSet& delta, const DecomposeParams& params);

/// Recompute block measurements and the disjointness/coverage invariants.
ValidationReport verify_decomposition(const Decomposition& d);

}  // namespace nonsmooth
