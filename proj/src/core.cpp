#include "disent/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace disent {

void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

namespace {

void require_finite_nonneg(double x, const std::string& code, const std::string& what) {
  if (!std::isfinite(x) || x < 0.0) fail(code, what + " must be finite and non-negative");
}

}  // namespace

MeasureSpace::MeasureSpace(std::vector<std::string> ids, std::vector<double> mu)
    : atoms(std::move(ids)), mass(std::move(mu)) {
  if (atoms.size() != mass.size())
    fail("invalid_measure", "atom/mass length mismatch");
  if (atoms.empty()) fail("invalid_measure", "measure space has no atoms");
  std::unordered_set<std::string> seen;
  for (const auto& id : atoms)
    if (!seen.insert(id).second)
      fail("invalid_measure", "duplicate atom id '" + id + "'");
  double total = 0.0;
  for (double m : mass) {
    require_finite_nonneg(m, "invalid_measure", "atom mass");
    total += m;
  }
  if (!(total > 0.0)) fail("invalid_measure", "total mass must be positive");
}

double MeasureSpace::total_mass() const {
  double total = 0.0;
  for (double m : mass) total += m;
  return total;
}

std::vector<std::size_t> MeasureSpace::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0.0) out.push_back(i);
  return out;
}

WeightFamily::WeightFamily(std::vector<std::string> k, std::vector<std::vector<double>> v)
    : keys(std::move(k)), values(std::move(v)) {
  if (keys.empty()) fail("invalid_family", "family must have at least one key");
  if (keys.size() != values.size())
    fail("invalid_family", "key/value length mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& id : keys)
    if (!seen.insert(id).second)
      fail("invalid_family", "duplicate weight key '" + id + "'");
  const std::size_t n = values.front().size();
  for (const auto& row : values) {
    if (row.size() != n) fail("invalid_family", "ragged weight vectors");
    for (double x : row) require_finite_nonneg(x, "invalid_family", "weight entry");
  }
}

GeometricWeights::GeometricWeights(std::vector<double> t) : theta(std::move(t)) {
  if (theta.empty()) fail("invalid_theta", "theta is empty");
  double sum = 0.0;
  for (double th : theta) {
    if (!std::isfinite(th) || th <= 0.0 || th >= 1.0)
      fail("invalid_theta", "each theta_j must lie in (0,1)");
    sum += th;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    fail("invalid_theta", "theta must sum to 1 within 1e-12");
  for (double& th : theta) th /= sum;
}

Exponent::Exponent(double value) : q(value) {
  if (!std::isfinite(q) || q <= 0.0 || q > 1.0)
    fail("invalid_exponent", "q must lie in (0,1]");
}

ProblemInstance::ProblemInstance(MeasureSpace s, std::vector<WeightFamily> f,
                                 GeometricWeights w, Exponent e)
    : space(std::move(s)), families(std::move(f)), weights(std::move(w)), exponent(e) {
  if (families.size() < 2) fail("invalid_instance", "need at least two slots (d >= 2)");
  if (weights.theta.size() != families.size())
    fail("dimension_mismatch", "theta length differs from number of families");
  for (const auto& fam : families)
    if (fam.atom_count() != space.size())
      fail("dimension_mismatch", "family weight length differs from atom count");
}

ProblemInstance ProblemInstance::with_exponent(double q) const {
  return ProblemInstance(space, families, weights, Exponent(q));
}

ProblemInstance ProblemInstance::with_space(MeasureSpace s) const {
  return ProblemInstance(std::move(s), families, weights, exponent);
}

std::vector<double> apply_operator(const WeightFamily& family,
                                   const std::vector<double>& alpha) {
  if (alpha.size() != family.key_count())
    fail("dimension_mismatch", "coefficient vector length differs from key count");
  for (double a : alpha)
    if (!std::isfinite(a) || a < 0.0)
      fail("invalid_coefficients", "coefficients must be finite and non-negative");
  std::vector<double> out(family.atom_count(), 0.0);
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] == 0.0) continue;
    const auto& row = family.values[k];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha[k] * row[i];
  }
  return out;
}

double geometric_mean_integral(const MeasureSpace& space,
                               const std::vector<std::vector<double>>& phi,
                               const GeometricWeights& weights,
                               const Exponent& exponent) {
  const std::size_t d = weights.theta.size();
  if (phi.size() != d) fail("dimension_mismatch", "phi slot count differs from theta");
  for (const auto& p : phi)
    if (p.size() != space.size())
      fail("dimension_mismatch", "phi vector length differs from atom count");

  if (exponent.is_one()) {
    double essinf = kInf;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (!space.in_support(i)) continue;
      double lg = 0.0;
      bool zero = false;
      for (std::size_t j = 0; j < d; ++j) {
        if (phi[j][i] <= 0.0) { zero = true; break; }
        lg += weights.theta[j] * std::log(phi[j][i]);
      }
      essinf = std::min(essinf, zero ? 0.0 : std::exp(lg));
    }
    return essinf;
  }

  const double qp = exponent.conjugate();  // negative
  double sum = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.in_support(i)) continue;
    double lg = 0.0;
    bool zero = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (phi[j][i] <= 0.0) { zero = true; break; }
      lg += weights.theta[j] * std::log(phi[j][i]);
    }
    if (zero) return kInf;  // degenerate factorisation, q' < 0
    sum += space.mass[i] * std::exp(qp * lg);
  }
  return sum;
}

std::vector<double> componentwise_integrals(const MeasureSpace& space,
                                            const WeightFamily& family,
                                            const std::vector<double>& phi_j) {
  if (family.atom_count() != space.size() || phi_j.size() != space.size())
    fail("dimension_mismatch", "componentwise integral dimension mismatch");
  std::vector<double> out(family.key_count(), 0.0);
  for (std::size_t k = 0; k < family.key_count(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
      if (space.in_support(i)) s += space.mass[i] * family.values[k][i] * phi_j[i];
    out[k] = s;
  }
  return out;
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace disent
