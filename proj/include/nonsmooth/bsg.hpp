#pragma once

#include <string>

#include "nonsmooth/energy.hpp"

namespace nonsmooth {

struct QuadCount {
  Exact count = 0;      // #{b1 + c1 = b2 + c2}
  double eta_hat = 0;   // (2 log|C| + log|B| − log count) / log|B|
};

QuadCount quad_count(const GroupSet& b, const GroupSet& c);

enum class BsgVerdict { strong, weak, fail };
std::string to_string(BsgVerdict v);
BsgVerdict parse_bsg_verdict(const std::string& s);

struct BsgThresholds {
  double cover_exp = 0.9;    // cover_B >= |B|^e, cover_C >= |C|^e
  double doubling = 0.2;     // log|K−K|/log|K| − 1 <= this
  double x_exp = 0.2;        // |X| <= |B|^e |B|/|C|
};

struct BsgParams {
  BsgThresholds strong{};
  BsgThresholds weak{0.5, 0.5, 0.5};
  double closure_delta = 0.1;
  unsigned closure_rounds = 8;
  double cover_budget = 4.0;  // |X| <= cover_budget |B|/|C|
  double min_gain = 0.25;     // stop the cover when a translate adds < min_gain |C|
};

/// Fields recomputed from (B, C, K, X, x0) alone.
struct BsgMeasure {
  uint64_t cover_b = 0;
  uint64_t cover_c = 0;
  uint64_t diff_size = 0;  // |K − K|
  double doubling_ratio = 0;
  uint64_t x_size = 0;
};

BsgMeasure measure_bsg(const GroupSet& b, const GroupSet& c, const GroupSet& k, const GroupSet& x, uint64_t x0);

struct BsgCertificate {
  GroupSet B, C;
  GroupSet K, X;
  uint64_t x0 = 0;
  QuadCount quads;
  BsgMeasure measured;
  unsigned closure_rounds = 0;
  bool closure_converged = false;
  BsgVerdict verdict = BsgVerdict::fail;
  std::string reason;
  BsgParams params;
};

double doubling_ratio(uint64_t k_size, uint64_t diff_size);
BsgVerdict grade(const GroupSet& b, const GroupSet& c, const BsgMeasure& m, const BsgParams& params);

BsgCertificate asym_bsg(const GroupSet& b, const GroupSet& c, const BsgParams& params = {});

}  // namespace nonsmooth
