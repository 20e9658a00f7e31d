#include "disent/factorization.hpp"

#include <algorithm>
#include <cmath>

namespace disent {

namespace {

// phi from log-domain transformed vectors; throws naming the first offending
// (slot, atom) when some transformed value vanishes on the support.
Factorisation build_from_log_transformed(
    const ProblemInstance& instance,
    const std::vector<std::vector<double>>& log_t, double constant) {
  if (instance.exponent.is_one())
    fail("q_out_of_range",
         "the factorisation formula is undefined at q = 1; use a q sweep");
  const std::size_t d = instance.slot_count();
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < instance.space.size(); ++i)
      if (instance.space.in_support(i) && log_t[j][i] == -kInf)
        fail("positivity_violation",
             "transformed value vanishes at atom '" + instance.space.atoms[i] +
                 "' in slot " + std::to_string(j) +
                 " (non-maximiser or non-saturating family)");

  Factorisation fact;
  fact.constant = constant;
  fact.phi.assign(d, std::vector<double>(instance.space.size(), 0.0));
  for (std::size_t i = 0; i < instance.space.size(); ++i) {
    if (!instance.space.in_support(i)) continue;
    double lg = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      lg += instance.weights.theta[j] * instance.exponent.q * log_t[j][i];
    for (std::size_t j = 0; j < d; ++j)
      fact.phi[j][i] = std::exp(lg - log_t[j][i]);
  }
  return fact;
}

}  // namespace

Factorisation build_factorisation(const ProblemInstance& instance,
                                  const Extremizer& extremizer) {
  if (extremizer.log_transformed.size() == instance.slot_count())
    return build_from_log_transformed(instance, extremizer.log_transformed,
                                      extremizer.value);
  Factorisation f = build_factorisation(instance, extremizer.g);
  f.constant = extremizer.value;
  return f;
}

Factorisation build_factorisation(const ProblemInstance& instance,
                                  const Coefficients& coefficients) {
  const std::size_t d = instance.slot_count();
  if (coefficients.size() != d)
    fail("dimension_mismatch", "coefficient slot count differs from instance");
  std::vector<std::vector<double>> log_t(d,
      std::vector<double>(instance.space.size(), -kInf));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> t = apply_operator(instance.families[j], coefficients[j]);
    for (std::size_t i = 0; i < instance.space.size(); ++i)
      if (t[i] > 0.0) log_t[j][i] = std::log(t[i]);
  }
  return build_from_log_transformed(instance, log_t,
                                    evaluate_functional(instance, coefficients));
}

VerificationReport verify_factorisation(const ProblemInstance& instance,
                                        const Factorisation& factorisation,
                                        double tol) {
  VerificationReport rep;
  rep.constant = factorisation.constant;
  rep.tolerance = tol;
  rep.geometric_bound = geometric_mean_integral(
      instance.space, factorisation.phi, instance.weights, instance.exponent);
  if (instance.exponent.is_one())
    rep.geometric_pass = rep.geometric_bound >= 1.0 - tol;
  else
    rep.geometric_pass =
        rep.geometric_bound <= factorisation.constant * (1.0 + tol);

  rep.componentwise_pass = true;
  for (std::size_t j = 0; j < instance.slot_count(); ++j) {
    rep.componentwise.push_back(componentwise_integrals(
        instance.space, instance.families[j], factorisation.phi[j]));
    for (double v : rep.componentwise.back())
      if (v > factorisation.constant * (1.0 + tol)) rep.componentwise_pass = false;
  }
  rep.pass = rep.geometric_pass && rep.componentwise_pass;
  return rep;
}

double identity_check(const ProblemInstance& instance,
                      const Coefficients& coefficients) {
  if (instance.exponent.is_one())
    fail("q_out_of_range", "identity check requires q < 1");
  const std::size_t d = instance.slot_count();
  Factorisation fact = build_factorisation(instance, coefficients);

  std::vector<std::vector<double>> t(d);
  for (std::size_t j = 0; j < d; ++j)
    t[j] = apply_operator(instance.families[j], coefficients[j]);

  const double qp = instance.exponent.conjugate();
  double worst = 0.0;
  for (std::size_t i = 0; i < instance.space.size(); ++i) {
    if (!instance.space.in_support(i)) continue;
    double lphi = 0.0, lt = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      lphi += instance.weights.theta[j] * std::log(fact.phi[j][i]);
      lt += instance.weights.theta[j] * instance.exponent.q * std::log(t[j][i]);
    }
    const double lhs = std::exp(qp * lphi);
    const double rhs = std::exp(lt);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  return worst;
}

std::vector<double> default_schedule(int m_first, int m_last) {
  if (m_first < 1 || m_last < m_first)
    fail("invalid_config", "schedule range must satisfy 1 <= m_first <= m_last");
  std::vector<double> qs;
  for (int m = m_first; m <= m_last; ++m)
    qs.push_back(1.0 - std::pow(2.0, -m));
  return qs;
}

SweepResult q_sweep(const ProblemInstance& instance,
                    const std::vector<double>& schedule,
                    const SolveConfig& config, double tol) {
  if (schedule.empty()) fail("invalid_config", "empty sweep schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] <= 0.0 || schedule[i] >= 1.0)
      fail("invalid_config", "schedule exponents must lie in (0,1)");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      fail("invalid_config", "schedule must be strictly increasing");
  }

  // Membership checks across exponents need a probability measure; rescaling
  // changes neither maximisers nor phi, only the constant.
  const double total = instance.space.total_mass();
  std::vector<double> prob_mass = instance.space.mass;
  for (double& m : prob_mass) m /= total;
  const MeasureSpace prob_space(instance.space.atoms, prob_mass);

  SweepResult res;
  res.schedule = schedule;
  for (double q : schedule) {
    SweepPoint pt;
    pt.q = q;
    const ProblemInstance inst_q = instance.with_exponent(q);
    pt.extremizer = maximize(inst_q, config);
    pt.factorisation = build_factorisation(inst_q, pt.extremizer);
    pt.report = verify_factorisation(inst_q, pt.factorisation, tol);

    const double a = pt.extremizer.value;
    pt.normalized = pt.factorisation.phi;
    for (auto& row : pt.normalized)
      for (double& v : row) v /= a;

    // Membership at earlier exponents over the probability rescale. With
    // A_nu the constant over nu, the power-mean inequality (Jensen, since
    // q1' < 0 more than q2') gives
    //   int (prod phi^theta)^{q1'} dnu <= A_nu^{q1'/q2'},
    // while the componentwise bounds are exponent-free. Scaling phi by
    // A_nu^{-1/q2'} turns this into a certificate with constant
    // max(1, A_nu^{1/q2}); for instances normalized to A_nu <= 1 this is the
    // plain constant-1 membership.
    const double a_nu = a / total;
    const double qp = Exponent(q).conjugate();  // finite: q < 1 in schedules
    const double lam = std::pow(a_nu, -1.0 / qp);
    Factorisation scaled;
    scaled.constant = std::max(1.0, std::pow(a_nu, 1.0 / q));
    scaled.phi = pt.factorisation.phi;
    for (auto& row : scaled.phi)
      for (double& v : row) v *= lam;
    std::vector<bool> cross;
    for (const SweepPoint& earlier : res.points) {
      const ProblemInstance inst_early =
          instance.with_space(prob_space).with_exponent(earlier.q);
      cross.push_back(verify_factorisation(inst_early, scaled, tol).pass);
    }
    res.cross_pass.push_back(std::move(cross));
    res.points.push_back(std::move(pt));
  }
  res.limit_estimate = res.points.back().normalized;
  return res;
}

}  // namespace disent
