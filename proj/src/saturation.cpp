#include "disent/saturation.hpp"

#include <algorithm>
#include <cmath>

namespace disent {

bool check_saturation(const MeasureSpace& space, const WeightFamily& family) {
  if (family.atom_count() != space.size())
    fail("dimension_mismatch", "family defined over a different atom list");
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.in_support(i)) continue;
    bool covered = false;
    for (const auto& row : family.values)
      if (row[i] > 0.0) { covered = true; break; }
    if (!covered) return false;
  }
  return true;
}

std::optional<std::string> check_strong_saturation(const MeasureSpace& space,
                                                   const WeightFamily& family) {
  if (family.atom_count() != space.size())
    fail("dimension_mismatch", "family defined over a different atom list");
  for (std::size_t k = 0; k < family.key_count(); ++k) {
    bool positive = true;
    for (std::size_t i = 0; i < space.size(); ++i)
      if (space.in_support(i) && family.values[k][i] <= 0.0) { positive = false; break; }
    if (positive) return family.keys[k];
  }
  return std::nullopt;
}

CoverResult greedy_cover(const MeasureSpace& space, const WeightFamily& family) {
  if (family.atom_count() != space.size())
    fail("dimension_mismatch", "family defined over a different atom list");
  CoverResult res;
  std::vector<bool> covered(space.size(), false);
  std::vector<bool> used(family.key_count(), false);
  for (std::size_t step = 0; step < family.key_count(); ++step) {
    double best_gain = 0.0;
    std::size_t best_key = family.key_count();
    for (std::size_t k = 0; k < family.key_count(); ++k) {
      if (used[k]) continue;
      double gain = 0.0;
      for (std::size_t i = 0; i < space.size(); ++i)
        if (!covered[i] && space.in_support(i) && family.values[k][i] > 0.0)
          gain += space.mass[i];
      // exact maximizer; ties broken by lowest key index
      if (gain > best_gain) { best_gain = gain; best_key = k; }
    }
    if (best_key == family.key_count()) break;  // supremal uncovered gain is 0
    used[best_key] = true;
    res.chosen.push_back(family.keys[best_key]);
    res.gains.push_back(best_gain);
    for (std::size_t i = 0; i < space.size(); ++i)
      if (family.values[best_key][i] > 0.0) covered[i] = true;
  }
  res.covers = true;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.in_support(i) && !covered[i]) res.covers = false;
  return res;
}

UpgradeResult upgrade_to_probability(const MeasureSpace& space,
                                     const std::vector<WeightFamily>& families) {
  for (std::size_t j = 0; j < families.size(); ++j)
    if (!check_saturation(space, families[j]))
      fail("non_saturating_family",
           "family at slot " + std::to_string(j) + " does not saturate the space");

  std::size_t m = 0;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.in_support(i)) ++m;

  UpgradeResult res;
  res.w.assign(space.size(), 0.0);
  std::vector<double> nu_mass(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.in_support(i)) continue;
    res.w[i] = 1.0 / (static_cast<double>(m) * space.mass[i]);
    nu_mass[i] = 1.0 / static_cast<double>(m);
  }
  res.nu = MeasureSpace(space.atoms, nu_mass);

  for (std::size_t j = 0; j < families.size(); ++j) {
    const WeightFamily& fam = families[j];
    CoverResult cover = greedy_cover(space, fam);
    std::vector<double> agg(space.size(), 0.0);
    double coef = 0.5;
    for (const auto& key : cover.chosen) {
      const std::size_t k =
          std::find(fam.keys.begin(), fam.keys.end(), key) - fam.keys.begin();
      for (std::size_t i = 0; i < space.size(); ++i)
        agg[i] += coef * fam.values[k][i];
      coef *= 0.5;
    }
    std::vector<std::string> keys = fam.keys;
    std::vector<std::vector<double>> vals;
    vals.reserve(fam.key_count() + 1);
    for (const auto& row : fam.values) {
      std::vector<double> scaled(space.size(), 0.0);
      for (std::size_t i = 0; i < space.size(); ++i)
        if (space.in_support(i)) scaled[i] = row[i] / res.w[i];
      vals.push_back(std::move(scaled));
    }
    std::string agg_key = "__aggregate";
    while (std::find(keys.begin(), keys.end(), agg_key) != keys.end())
      agg_key += "_";
    std::vector<double> agg_scaled(space.size(), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i)
      if (space.in_support(i)) agg_scaled[i] = agg[i] / res.w[i];
    keys.push_back(agg_key);
    vals.push_back(std::move(agg_scaled));
    res.augmented.emplace_back(std::move(keys), std::move(vals));
    res.aggregate_keys.push_back(agg_key);
  }
  return res;
}

ProblemInstance upgrade_instance(const ProblemInstance& instance) {
  UpgradeResult up = upgrade_to_probability(instance.space, instance.families);
  return ProblemInstance(up.nu, up.augmented, instance.weights, instance.exponent);
}

ProblemInstance dummy_lift(const ProblemInstance& instance) {
  const double q = instance.exponent.q;
  if (instance.exponent.is_one())
    fail("q_out_of_range", "dummy lift requires q < 1; nothing to lift at q = 1");
  std::vector<double> theta;
  theta.reserve(instance.slot_count() + 1);
  for (double th : instance.weights.theta) theta.push_back(th * q);
  theta.push_back(1.0 - q);

  std::vector<WeightFamily> families = instance.families;
  families.emplace_back(std::vector<std::string>{"__dummy"},
                        std::vector<std::vector<double>>{
                            std::vector<double>(instance.space.size(), 1.0)});
  return ProblemInstance(instance.space, std::move(families),
                         GeometricWeights(std::move(theta)), Exponent(1.0));
}

bool composite_support_check(const MeasureSpace& space,
                             const std::vector<WeightFamily>& families) {
  // An atom lies in the support of some product weight iff every family has a
  // positive member there; so the combined family saturates iff each does.
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.in_support(i)) continue;
    for (const auto& fam : families) {
      bool positive = false;
      for (const auto& row : fam.values)
        if (row[i] > 0.0) { positive = true; break; }
      if (!positive) return false;
    }
  }
  return true;
}

}  // namespace disent
