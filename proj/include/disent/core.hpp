#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace disent {

// Domain error with a stable machine-readable code ("dimension_mismatch",
// "non_saturating_family", ...). The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

[[noreturn]] void fail(const std::string& code, const std::string& msg);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite discrete measure space: named atoms with non-negative masses.
// Atoms of zero mass are kept in the data model but excluded from every
// integral and every almost-everywhere check.
struct MeasureSpace {
  std::vector<std::string> atoms;
  std::vector<double> mass;

  MeasureSpace() = default;
  MeasureSpace(std::vector<std::string> ids, std::vector<double> mu);

  std::size_t size() const { return atoms.size(); }
  bool in_support(std::size_t i) const { return mass[i] > 0.0; }
  double total_mass() const;
  std::vector<std::size_t> support() const;
};

// Indexed family of non-negative weight vectors, one value per atom.
struct WeightFamily {
  std::vector<std::string> keys;
  std::vector<std::vector<double>> values;  // values[k][atom]

  WeightFamily() = default;
  WeightFamily(std::vector<std::string> k, std::vector<std::vector<double>> v);

  std::size_t key_count() const { return keys.size(); }
  std::size_t atom_count() const { return values.empty() ? 0 : values.front().size(); }
};

// Geometric-mean weights theta_j in (0,1) summing to 1. Admission tolerance
// 1e-12 on the sum, after which the vector is renormalized exactly.
struct GeometricWeights {
  std::vector<double> theta;

  GeometricWeights() = default;
  explicit GeometricWeights(std::vector<double> t);
};

// Exponent q in (0,1] with its (negative) conjugate; q=1 carries the
// marker -infinity and switches integrals to the essential-infimum reading.
struct Exponent {
  double q = 1.0;

  Exponent() = default;
  explicit Exponent(double value);

  bool is_one() const { return q == 1.0; }
  double conjugate() const { return is_one() ? -kInf : q / (q - 1.0); }
};

struct ProblemInstance {
  MeasureSpace space;
  std::vector<WeightFamily> families;
  GeometricWeights weights;
  Exponent exponent;

  ProblemInstance() = default;
  ProblemInstance(MeasureSpace s, std::vector<WeightFamily> f,
                  GeometricWeights w, Exponent e);

  std::size_t slot_count() const { return families.size(); }

  ProblemInstance with_exponent(double q) const;
  ProblemInstance with_space(MeasureSpace s) const;
};

// Per-slot non-negative coefficient vectors indexed by the family keys.
using Coefficients = std::vector<std::vector<double>>;

struct Extremizer {
  Coefficients g;                                  // each row on the unit simplex
  double value = 0.0;                              // attained constant A
  std::vector<std::vector<double>> transformed;    // T_j g_j per slot, per atom
  std::vector<std::vector<double>> log_g;          // log-domain companions; -inf marks 0
  std::vector<std::vector<double>> log_transformed;
  std::vector<std::pair<std::size_t, std::size_t>> low_positivity;  // (slot, atom)
  double positivity_margin = 0.0;  // min over slots/support of t / max-entry of that slot
};

struct Factorisation {
  std::vector<std::vector<double>> phi;  // phi[j][atom]
  double constant = 0.0;
};

// T_j(alpha) = sum_k alpha_k u_{j,k}, pointwise.
std::vector<double> apply_operator(const WeightFamily& family,
                                   const std::vector<double>& alpha);

// For q<1: sum over support of mu * (prod_j phi_j^theta_j)^{q'}; returns +inf
// when some phi_j vanishes on a positive-mass atom (q' < 0 blows up there).
// For q=1: essential infimum of prod_j phi_j^theta_j over the support.
double geometric_mean_integral(const MeasureSpace& space,
                               const std::vector<std::vector<double>>& phi,
                               const GeometricWeights& weights,
                               const Exponent& exponent);

// Per key k: sum over atoms of mu * u_{j,k} * phi_j.
std::vector<double> componentwise_integrals(const MeasureSpace& space,
                                            const WeightFamily& family,
                                            const std::vector<double>& phi_j);

// log-sum-exp over a vector that may contain -inf entries.
double log_sum_exp(const std::vector<double>& v);

}  // namespace disent
