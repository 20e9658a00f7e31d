#pragma once

#include <cstdint>
#include <vector>

#include "disent/core.hpp"

namespace disent {

struct SolveConfig {
  int restarts = 16;
  int max_iters = 5000;        // projected gradient iterations per restart
  double step_init = 1.0;
  double armijo_beta = 0.5;
  double tol_grad = 1e-10;     // gradient-map infinity norm
  double tol_value = 1e-12;    // relative value improvement
  std::uint64_t seed = 0;
  double positivity_floor = 1e-14;
  int refine_iters = 50000;    // log-domain multiplicative refinement cap
};

struct OracleConfig {
  int resolution = 200;            // grid steps per simplex coordinate
  double max_points = 2e7;         // auto-scaling budget for the full grid
  bool auto_scale = true;          // shrink resolution to fit max_points
};

struct OracleResult {
  double value = 0.0;
  Coefficients argmax;
  int resolution = 0;              // per-coordinate steps actually used
  std::uint64_t points = 0;        // total grid points evaluated
  double grid_bound = 0.0;         // discretization bound from the Hoelder estimate
};

// I(alpha) = sum_w mu(w) prod_j (T_j alpha_j)(w)^{theta_j q}; log-domain
// atomwise with a zero short-circuit.
double evaluate_functional(const ProblemInstance& instance,
                           const Coefficients& coefficients);

// Multistart projected gradient ascent over the product of unit simplices,
// followed by a log-domain multiplicative refinement stage (coefficients can
// be exponentially small near q = 1; see Extremizer::log_g). Requires q < 1
// and saturating families.
Extremizer maximize(const ProblemInstance& instance, const SolveConfig& config = {});

// Exhaustive rational-grid enumeration of the product of simplices; the
// independent oracle for the least constant. Hard guard at 1e8 grid points.
OracleResult brute_force_constant(const ProblemInstance& instance,
                                  const OracleConfig& config = {});

// Euclidean projection onto the unit simplex (in place).
void project_to_simplex(std::vector<double>& x);

}  // namespace disent
