#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disent/core.hpp"

namespace disent {

// Result of the greedy countable-cover construction over the supports of a
// family's weights. `covers` is true exactly when the family saturates.
struct CoverResult {
  std::vector<std::string> chosen;  // keys, in greedy order
  std::vector<double> gains;        // uncovered mass captured per step
  bool covers = false;
};

// Output of the probability / strong-saturation upgrade: a probability
// measure nu = w * mu, the density w, and per slot the original weights
// rescaled by 1/w plus one aggregated strictly positive weight.
struct UpgradeResult {
  MeasureSpace nu;
  std::vector<double> w;
  std::vector<WeightFamily> augmented;
  std::vector<std::string> aggregate_keys;
};

// True iff every positive-mass atom lies in the support of some family weight.
bool check_saturation(const MeasureSpace& space, const WeightFamily& family);

// First key (in family order) strictly positive on every positive-mass atom.
std::optional<std::string> check_strong_saturation(const MeasureSpace& space,
                                                   const WeightFamily& family);

CoverResult greedy_cover(const MeasureSpace& space, const WeightFamily& family);

UpgradeResult upgrade_to_probability(const MeasureSpace& space,
                                     const std::vector<WeightFamily>& families);

// Convenience: upgrade and reassemble an instance with the same theta and q.
ProblemInstance upgrade_instance(const ProblemInstance& instance);

// Rewrites a q<1 instance as a (d+1)-slot q=1 instance: theta'_j = theta_j*q,
// theta'_{d+1} = 1-q, extra singleton all-ones family. Rejects q=1 input.
ProblemInstance dummy_lift(const ProblemInstance& instance);

// Whether the pointwise products over all key combinations saturate the
// space; on a finite space this holds iff every family saturates.
bool composite_support_check(const MeasureSpace& space,
                             const std::vector<WeightFamily>& families);

}  // namespace disent
