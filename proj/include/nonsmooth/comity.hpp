#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nonsmooth/structure.hpp"

namespace nonsmooth {

/// Fibers Δ[x] = Δ ∩ (x + Δ) for x in a key set, packed over positions in Δ.
class FiberTable {
 public:
  FiberTable(const BaseAnalysis& base, const GroupSet& keys);

  const PackedBits& operator()(uint64_t x) const;
  const GroupSet& keys() const { return keys_; }

  static PackedBits compute(const BaseAnalysis& base, uint64_t x);

 private:
  GroupSet keys_;
  PositionIndex key_pos_;
  std::vector<PackedBits> fibers_;
};

/// |Δ ∩ (x + Δ) ∩ (y + Δ)|.
uint64_t overlap(const BaseAnalysis& base, uint64_t x, uint64_t y);

struct BandStat {
  uint64_t lo = 0;
  Exact count = 0;
  Exact mass = 0;
  uint64_t min_value = 0;
};

struct CertificateOptions {
  uint64_t pair_cap = 1'000'000;          // stored enumeration bound
  double work_budget = 17179869184.0;     // 2^34 elementary steps before sampling rows
};

struct ComityCertificate {
  double tau = 0, alpha = 0, beta = 0, mu = 0;
  uint64_t band_lo = 0;      // overlaps in [w, 2w)
  uint64_t min_overlap = 0;  // smallest overlap in the band; β = log_M of it
  Exact pair_count = 0;      // |𝒫|
  Exact mass = 0;            // Σ_{𝒫} overlap
  Exact total = 0;           // Σ_{x,y ∈ D} overlap, via Σ_a deg_D(a)^2
  Exact enumerated_total = 0;  // same sum by direct enumeration (complete runs only)
  bool sampled = false;        // band statistics estimated from a row sample
  bool pairs_complete = false;
  uint64_t rows_scanned = 0;
  std::vector<std::pair<uint64_t, uint64_t>> pairs;  // stored part of 𝒫
  std::vector<BandStat> bands;
};

ComityCertificate comity_certificate(const BaseAnalysis& base, const AdditiveStructure& s,
                                     const CertificateOptions& opts = {});

/// Re-derive every stored quantity from Δ, D and the band.
ValidationReport verify_comity(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c);

struct FSets {
  GroupSet f_x;   // {y ∈ D : (x, y) ∈ 𝒫}
  GroupSet f_xa;  // {b ∈ Δ : b − a ∈ F_x}
  GroupSet f_a;   // {b ∈ Δ : b − a ∈ D}
};

FSets f_sets(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c, uint64_t x, uint64_t a);

struct SidewaysCertificate {
  double tau = 0, alpha = 0, gamma = 0, nu = 0;
  uint64_t comity_band_lo = 0;  // defines 𝒫 and hence F_x
  uint64_t band_lo = 0;
  uint64_t min_value = 0;
  Exact q_count = 0;
  Exact mass = 0;
  Exact total = 0;  // Σ_x Σ_b |Δ[x] ∩ F_{x,b}|
  bool sampled = false;
  bool pairs_complete = false;
  uint64_t rows_scanned = 0;
  std::vector<std::pair<uint64_t, uint64_t>> pairs;  // stored part of 𝒬, as (x, b)
  std::vector<BandStat> bands;
};

SidewaysCertificate sideways_certificate(const BaseAnalysis& base, const AdditiveStructure& s,
                                         const ComityCertificate& c, const CertificateOptions& opts = {});

ValidationReport verify_sideways(const BaseAnalysis& base, const AdditiveStructure& s, const SidewaysCertificate& q);

/// Σ_x Σ_{y ∈ F_x} |Δ[x] ∩ Δ[y]|, the other side of the sideways interchange identity.
Exact sideways_total_by_overlaps(const BaseAnalysis& base, const AdditiveStructure& s, uint64_t comity_band_lo);

enum class StepKind { has_certificate, new_structure, stall };
std::string to_string(StepKind k);

struct ComityStep {
  StepKind kind = StepKind::stall;
  ComityCertificate certificate;
  std::optional<AdditiveStructure> structure;
  double old_height = 0;
  double new_height = 0;
  double predicted_height = 0;  // α − μ + 2σ
  uint64_t threshold = 0;       // D_β = {d : r(d) >= threshold}
};

ComityStep comity_increment(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c,
                            double mu_target, double sigma_hat);

struct SidewaysStep {
  StepKind kind = StepKind::stall;
  SidewaysCertificate certificate;
  std::optional<AdditiveStructure> structure;
  double old_height = 0;
  double new_height = 0;
  double predicted_height = 0;  // α + μ − ν/2
  uint64_t threshold = 0;       // |Δ ∩ (a + b − Δ)| >= threshold
  Exact union_total = 0;        // Σ_b |∪_{x ∈ K_b} Δ_{x,b}|
  std::vector<std::pair<uint64_t, uint64_t>> sample;  // some (b, a) of the union, for rechecks
};

SidewaysStep sideways_increment(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c,
                                const SidewaysCertificate& q, double nu_target);

}  // namespace nonsmooth
