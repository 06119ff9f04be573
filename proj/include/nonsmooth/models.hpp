#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nonsmooth/group_set.hpp"

namespace nonsmooth {

/// Uniform integer in [0, n) from a 64-bit engine by rejection; unlike the
/// standard distributions its output is fixed across standard libraries.
uint64_t uniform_below(std::mt19937_64& rng, uint64_t n);

enum class Model { subgroup_random, subgroup_plus_random, union_subgroups, uniform };
std::string to_string(Model m);
Model parse_model(const std::string& s);  // accepts '-' or '_' spellings

struct ModelSpec {
  Model model = Model::uniform;
  GroupSpec group;
  uint64_t seed = 0;
  uint64_t subgroup_size = 0;  // |H| (|H_j| for union_subgroups)
  double density = 1.0;        // subgroup_random: |A| = round(density |H|)
  uint64_t random_size = 0;    // |R| for subgroup_plus_random, |A| for uniform
  uint64_t count = 1;          // number of subgroups for union_subgroups
  bool translates = false;     // union_subgroups: pairwise disjoint translates t_j + H_j
  uint64_t max_intersection = 1;  // union_subgroups without translates: bound on |H_i ∩ H_j|
};

struct Generated {
  GroupSet set;                    // symmetrized
  uint64_t raw_size = 0;           // size before symmetrization
  std::vector<GroupSet> subgroups;  // planted H or H_j
  std::vector<uint64_t> shifts;     // translate offsets (union_subgroups with translates)
  GroupSet random_part;             // R (subgroup_plus_random)
  uint64_t max_overlap = 0;         // largest |H_i ∩ H_j| (union_subgroups)
};

/// Deterministic in the spec; throws std::invalid_argument on infeasible sizes
/// and std::runtime_error when resampling gives up (100 attempts).
Generated generate(const ModelSpec& spec);
inline GroupSet gen(const ModelSpec& spec) { return generate(spec).set; }

/// Random subgroup of exactly the requested size.
GroupSet random_subgroup(const GroupSpec& spec, uint64_t size, std::mt19937_64& rng);

struct Exponents {
  double epsilon = 0;
  double tau_pred = 0;
  double sigma_pred = 0;
};

/// Closed-form predictions for the planted families; nullopt for uniform.
std::optional<Exponents> expected_exponents(const ModelSpec& spec);

}  // namespace nonsmooth
