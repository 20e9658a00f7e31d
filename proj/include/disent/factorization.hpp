#pragma once

#include <vector>

#include "disent/core.hpp"
#include "disent/optimizer.hpp"

namespace disent {

struct VerificationReport {
  double geometric_bound = 0.0;                      // LHS of the geometric condition
  std::vector<std::vector<double>> componentwise;    // per slot, per key
  double constant = 0.0;
  double tolerance = 1e-8;
  bool geometric_pass = false;
  bool componentwise_pass = false;
  bool pass = false;
};

struct SweepPoint {
  double q = 0.0;
  Extremizer extremizer;
  Factorisation factorisation;
  std::vector<std::vector<double>> normalized;  // phi / A (A w.r.t. the input measure)
  VerificationReport report;
};

struct SweepResult {
  std::vector<double> schedule;
  std::vector<SweepPoint> points;
  // cross_pass[i][j] for j < i: does the factorisation at schedule[i],
  // rescaled to its membership certificate over the probability measure,
  // verify at the smaller exponent schedule[j]?
  std::vector<std::vector<bool>> cross_pass;
  std::vector<std::vector<double>> limit_estimate;  // last normalized phi
};

// phi_i = prod_j (T_j g_j)^{theta_j q} / (T_i g_i), in log domain. Requires
// q < 1 and strictly positive transformed values on the support.
Factorisation build_factorisation(const ProblemInstance& instance,
                                  const Extremizer& extremizer);

// Same formula from an arbitrary coefficient point (the algebraic identity
// behind the geometric condition holds off-maximiser too).
Factorisation build_factorisation(const ProblemInstance& instance,
                                  const Coefficients& coefficients);

VerificationReport verify_factorisation(const ProblemInstance& instance,
                                        const Factorisation& factorisation,
                                        double tol = 1e-8);

// Max relative pointwise discrepancy between (prod_i phi_i^theta_i)^{q'} and
// prod_j (T_j g_j)^{theta_j q} over the support.
double identity_check(const ProblemInstance& instance,
                      const Coefficients& coefficients);

std::vector<double> default_schedule(int m_first = 1, int m_last = 12);

// For each q in the schedule: maximize, build, verify; then check membership
// of each factorisation at every earlier scheduled exponent over the
// probability-rescaled measure. Normalized trajectories use the constant of
// the instance as given.
SweepResult q_sweep(const ProblemInstance& instance,
                    const std::vector<double>& schedule,
                    const SolveConfig& config = {}, double tol = 1e-8);

}  // namespace disent
