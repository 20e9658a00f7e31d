#include "disent/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "disent/saturation.hpp"

namespace disent {

namespace {

constexpr double kLogFloor = -1e5;  // log-domain stand-in for a zero coefficient

struct Workspace {
  const ProblemInstance& inst;
  std::vector<std::size_t> sup;    // support atom indices
  std::vector<double> logmu;       // per support index
  std::vector<double> exps;        // theta_j * q

  explicit Workspace(const ProblemInstance& pi) : inst(pi) {
    sup = pi.space.support();
    logmu.reserve(sup.size());
    for (std::size_t s : sup) logmu.push_back(std::log(pi.space.mass[s]));
    exps.reserve(pi.slot_count());
    for (double th : pi.weights.theta) exps.push_back(th * pi.exponent.q);
  }

  double u(std::size_t j, std::size_t k, std::size_t si) const {
    return inst.families[j].values[k][sup[si]];
  }
};

// Value and gradient in the linear domain. Atoms where some transformed
// value vanishes contribute 0 and are skipped in the gradient.
double eval_linear(const Workspace& ws, const Coefficients& a, Coefficients* grad) {
  const std::size_t d = ws.inst.slot_count();
  if (grad)
    for (std::size_t j = 0; j < d; ++j)
      std::fill((*grad)[j].begin(), (*grad)[j].end(), 0.0);
  std::vector<double> t(d);
  double total = 0.0;
  for (std::size_t si = 0; si < ws.sup.size(); ++si) {
    bool zero = false;
    double lg = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double tj = 0.0;
      for (std::size_t k = 0; k < a[j].size(); ++k) tj += a[j][k] * ws.u(j, k, si);
      if (tj <= 0.0) { zero = true; break; }
      t[j] = tj;
      lg += ws.exps[j] * std::log(tj);
    }
    if (zero) continue;
    const double contrib = std::exp(ws.logmu[si] + lg);
    total += contrib;
    if (grad)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = contrib * ws.exps[j] / t[j];
        for (std::size_t k = 0; k < a[j].size(); ++k)
          (*grad)[j][k] += c * ws.u(j, k, si);
      }
  }
  return total;
}

// Log-domain value; fills lnt[j][si] = log (T_j g_j) on the support.
double eval_log(const Workspace& ws, const Coefficients& la,
                std::vector<std::vector<double>>& lnt) {
  const std::size_t d = ws.inst.slot_count();
  lnt.assign(d, std::vector<double>(ws.sup.size(), -kInf));
  std::vector<double> lnJ(ws.sup.size(), -kInf);
  for (std::size_t si = 0; si < ws.sup.size(); ++si) {
    double acc = ws.logmu[si];
    bool zero = false;
    for (std::size_t j = 0; j < d; ++j) {
      double m = -kInf;
      for (std::size_t k = 0; k < la[j].size(); ++k) {
        const double uu = ws.u(j, k, si);
        if (uu <= 0.0) continue;
        m = std::max(m, la[j][k] + std::log(uu));
      }
      if (m == -kInf) { zero = true; break; }
      double s = 0.0;
      for (std::size_t k = 0; k < la[j].size(); ++k) {
        const double uu = ws.u(j, k, si);
        if (uu <= 0.0) continue;
        s += std::exp(la[j][k] + std::log(uu) - m);
      }
      lnt[j][si] = m + std::log(s);
      acc += ws.exps[j] * lnt[j][si];
    }
    if (!zero) lnJ[si] = acc;
  }
  return log_sum_exp(lnJ);
}

// Multiplicative-update residuals r[j][k] = log(dI/dalpha_{j,k} * alpha-free
// scale) - log(theta_j q I); zero at a KKT point for active coordinates.
void log_residuals(const Workspace& ws, const std::vector<std::vector<double>>& lnt,
                   double lnI, Coefficients& r) {
  const std::size_t d = ws.inst.slot_count();
  std::vector<double> lnJ(ws.sup.size());
  for (std::size_t si = 0; si < ws.sup.size(); ++si) {
    double acc = ws.logmu[si];
    for (std::size_t j = 0; j < d; ++j) acc += ws.exps[j] * lnt[j][si];
    lnJ[si] = acc;
  }
  std::vector<double> terms;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < r[j].size(); ++k) {
      terms.clear();
      for (std::size_t si = 0; si < ws.sup.size(); ++si) {
        const double uu = ws.u(j, k, si);
        if (uu <= 0.0 || lnJ[si] == -kInf || lnt[j][si] == -kInf) continue;
        terms.push_back(lnJ[si] - lnt[j][si] + std::log(uu));
      }
      r[j][k] = log_sum_exp(terms) - lnI;
    }
  }
}

void normalize_log_row(std::vector<double>& row) {
  const double z = log_sum_exp(row);
  for (double& x : row) x = std::max(x - z, kLogFloor);
}

struct RestartOutcome {
  Coefficients la;  // log coefficients, rows log-normalized
  double lnI = -kInf;
};

RestartOutcome run_restart(const Workspace& ws, const SolveConfig& cfg,
                           std::uint64_t restart_seed) {
  const std::size_t d = ws.inst.slot_count();
  std::mt19937_64 rng(restart_seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);

  Coefficients x(d), grad(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t m = ws.inst.families[j].key_count();
    x[j].resize(m);
    grad[j].resize(m);
    double s = 0.0;
    for (double& v : x[j]) { v = unif(rng); s += v; }
    for (double& v : x[j]) v /= s;
  }

  // Phase 1: projected gradient ascent with Armijo backtracking.
  double f = eval_linear(ws, x, &grad);
  double step = cfg.step_init;
  for (int it = 0; it < cfg.max_iters; ++it) {
    double gm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> probe = x[j];
      for (std::size_t k = 0; k < probe.size(); ++k) probe[k] += grad[j][k];
      project_to_simplex(probe);
      for (std::size_t k = 0; k < probe.size(); ++k)
        gm = std::max(gm, std::abs(probe[k] - x[j][k]));
    }
    if (gm < cfg.tol_grad) break;

    double s = step;
    Coefficients xt(d);
    double ft = f;
    while (true) {
      double lin = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        xt[j] = x[j];
        for (std::size_t k = 0; k < xt[j].size(); ++k) xt[j][k] += s * grad[j][k];
        project_to_simplex(xt[j]);
        for (std::size_t k = 0; k < xt[j].size(); ++k)
          lin += grad[j][k] * (xt[j][k] - x[j][k]);
      }
      ft = eval_linear(ws, xt, nullptr);
      if (ft >= f + 1e-4 * lin || s < 1e-18) break;
      s *= cfg.armijo_beta;
    }
    if (!(ft > f + cfg.tol_value * std::max(1.0, std::abs(f)))) break;
    x = xt;
    f = eval_linear(ws, x, &grad);
    step = std::min(s / cfg.armijo_beta, 1e6);
  }

  // Phase 2: log-domain multiplicative refinement. Near q = 1 the maximiser
  // coordinates can be exponentially small, far below the smallest positive
  // double; the log parametrization keeps them representable.
  Coefficients la(d);
  for (std::size_t j = 0; j < d; ++j) {
    la[j].resize(x[j].size());
    for (std::size_t k = 0; k < x[j].size(); ++k)
      la[j][k] = std::log(std::max(x[j][k], 1e-12));
    normalize_log_row(la[j]);
  }

  std::vector<std::vector<double>> lnt, lnt2;
  double lnI = eval_log(ws, la, lnt);
  Coefficients r = la, prev_delta = la, delta = la;
  bool have_prev = false;
  for (auto& row : prev_delta) std::fill(row.begin(), row.end(), 0.0);
  double relax = 1.0;
  int accepted = 0;

  for (int it = 0; it < cfg.refine_iters; ++it) {
    log_residuals(ws, lnt, lnI, r);
    Coefficients la2 = la;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < la2[j].size(); ++k) {
        const double rr = r[j][k];
        la2[j][k] = (rr == -kInf) ? kLogFloor
                                  : std::max(la2[j][k] + relax * rr, kLogFloor);
      }
      normalize_log_row(la2[j]);
    }
    const double lnI2 = eval_log(ws, la2, lnt2);
    if (lnI2 < lnI - 1e-13 * std::max(1.0, std::abs(lnI))) {
      relax *= 0.5;
      if (relax < 1e-3) break;
      continue;
    }
    double maxdelta = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < la[j].size(); ++k) {
        delta[j][k] = la2[j][k] - la[j][k];
        if (la2[j][k] > kLogFloor + 1.0)
          maxdelta = std::max(maxdelta, std::abs(delta[j][k]));
      }
    la.swap(la2);
    lnt.swap(lnt2);
    lnI = lnI2;
    ++accepted;
    if (maxdelta < 1e-10) break;

    // Geometric extrapolation for coordinates in a steady multiplicative
    // drift (the flat regime near q = 1 moves log-coordinates by a nearly
    // constant ratio per step).
    if (have_prev && accepted % 16 == 0) {
      Coefficients la_try = la;
      bool jumped = false;
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < la[j].size(); ++k) {
          const double cur = delta[j][k], prev = prev_delta[j][k];
          if (cur == 0.0 || prev == 0.0) continue;
          if ((cur > 0) != (prev > 0)) continue;
          const double rho = cur / prev;
          if (!(rho > 0.05 && rho < 0.999999)) continue;
          double jump = cur * rho / (1.0 - rho);
          jump = std::clamp(jump, -2e5, 2e5);
          la_try[j][k] = std::max(la_try[j][k] + jump, kLogFloor);
          jumped = true;
        }
      if (jumped) {
        for (auto& row : la_try) normalize_log_row(row);
        const double lnI_try = eval_log(ws, la_try, lnt2);
        if (lnI_try >= lnI - 1e-12 * std::max(1.0, std::abs(lnI))) {
          la.swap(la_try);
          lnt.swap(lnt2);
          lnI = lnI_try;
        }
      }
    }
    prev_delta = delta;
    have_prev = true;
  }

  return RestartOutcome{std::move(la), lnI};
}

double binom_double(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

void gen_compositions(int parts, int total, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    gen_compositions(parts - 1, total - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace

double evaluate_functional(const ProblemInstance& instance,
                           const Coefficients& coefficients) {
  if (coefficients.size() != instance.slot_count())
    fail("dimension_mismatch", "coefficient slot count differs from instance");
  const std::size_t d = instance.slot_count();
  std::vector<std::vector<double>> t(d);
  for (std::size_t j = 0; j < d; ++j)
    t[j] = apply_operator(instance.families[j], coefficients[j]);

  double total = 0.0;
  for (std::size_t i = 0; i < instance.space.size(); ++i) {
    if (!instance.space.in_support(i)) continue;
    double lg = 0.0;
    bool zero = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (t[j][i] <= 0.0) { zero = true; break; }
      lg += instance.weights.theta[j] * instance.exponent.q * std::log(t[j][i]);
    }
    if (!zero) total += instance.space.mass[i] * std::exp(lg);
  }
  return total;
}

Extremizer maximize(const ProblemInstance& instance, const SolveConfig& config) {
  if (instance.exponent.is_one())
    fail("q_out_of_range",
         "direct maximization at q = 1 is unsupported; run a q sweep instead");
  for (std::size_t j = 0; j < instance.slot_count(); ++j)
    if (!check_saturation(instance.space, instance.families[j]))
      fail("non_saturating_family",
           "family at slot " + std::to_string(j) + " does not saturate the space");

  Workspace ws(instance);
  RestartOutcome best;
  int best_restart = -1;
  for (int rs = 0; rs < config.restarts; ++rs) {
    const std::uint64_t rseed =
        (config.seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(rs) + 1));
    RestartOutcome out = run_restart(ws, config, rseed);
    if (best_restart < 0 || out.lnI > best.lnI) {
      best = std::move(out);
      best_restart = rs;
    }
  }

  const std::size_t d = instance.slot_count();
  Extremizer ext;
  ext.value = std::exp(best.lnI);
  ext.log_g = best.la;
  ext.g.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    ext.g[j].resize(best.la[j].size());
    for (std::size_t k = 0; k < best.la[j].size(); ++k) {
      double v = std::exp(best.la[j][k]);
      if (v < config.positivity_floor) v = 0.0;  // clamp only in the report
      ext.g[j][k] = v;
    }
  }

  // Transformed vectors over all atoms, in both domains.
  ext.transformed.assign(d, std::vector<double>(instance.space.size(), 0.0));
  ext.log_transformed.assign(d, std::vector<double>(instance.space.size(), -kInf));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < instance.space.size(); ++i) {
      std::vector<double> terms;
      for (std::size_t k = 0; k < best.la[j].size(); ++k) {
        const double uu = instance.families[j].values[k][i];
        if (uu <= 0.0 || best.la[j][k] <= kLogFloor) continue;
        terms.push_back(best.la[j][k] + std::log(uu));
      }
      const double lt = log_sum_exp(terms);
      ext.log_transformed[j][i] = lt;
      ext.transformed[j][i] = (lt == -kInf) ? 0.0 : std::exp(lt);
    }
  }

  ext.positivity_margin = kInf;
  for (std::size_t j = 0; j < d; ++j) {
    double lmax = -kInf;
    for (std::size_t i = 0; i < instance.space.size(); ++i)
      if (instance.space.in_support(i))
        lmax = std::max(lmax, ext.log_transformed[j][i]);
    for (std::size_t i = 0; i < instance.space.size(); ++i) {
      if (!instance.space.in_support(i)) continue;
      const double lt = ext.log_transformed[j][i];
      if (ext.transformed[j][i] <= config.positivity_floor)
        ext.low_positivity.emplace_back(j, i);
      const double margin = (lt == -kInf) ? 0.0 : std::exp(lt - lmax);
      ext.positivity_margin = std::min(ext.positivity_margin, margin);
    }
  }
  return ext;
}

OracleResult brute_force_constant(const ProblemInstance& instance,
                                  const OracleConfig& config) {
  if (config.resolution < 2) fail("invalid_config", "oracle resolution must be >= 2");
  const std::size_t d = instance.slot_count();
  const auto total_for = [&](int n) {
    double t = 1.0;
    for (const auto& fam : instance.families) {
      const int m = static_cast<int>(fam.key_count());
      t *= binom_double(n + m - 1, m - 1);
      if (t > 1e18) return 1e18;
    }
    return t;
  };

  int n = config.resolution;
  if (config.auto_scale)
    while (n > 2 && total_for(n) > config.max_points) --n;
  const double total = total_for(n);
  if (total > 1e8)
    fail("grid_guard_exceeded",
         "grid would need " + std::to_string(static_cast<std::uint64_t>(total)) +
             " points (guard: 100000000)");

  Workspace ws(instance);
  // Per family: grid points and their powered transformed vectors on support.
  std::vector<std::vector<std::vector<int>>> comps(d);
  std::vector<std::vector<std::vector<double>>> powered(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<int> cur;
    gen_compositions(static_cast<int>(instance.families[j].key_count()), n, cur,
                     comps[j]);
    powered[j].reserve(comps[j].size());
    for (const auto& c : comps[j]) {
      std::vector<double> pw(ws.sup.size());
      for (std::size_t si = 0; si < ws.sup.size(); ++si) {
        double t = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
          t += (static_cast<double>(c[k]) / n) * ws.u(j, k, si);
        pw[si] = (t <= 0.0) ? 0.0 : std::pow(t, ws.exps[j]);
      }
      powered[j].push_back(std::move(pw));
    }
  }

  std::vector<double> mu(ws.sup.size());
  for (std::size_t si = 0; si < ws.sup.size(); ++si)
    mu[si] = instance.space.mass[ws.sup[si]];

  OracleResult res;
  res.resolution = n;
  std::vector<std::size_t> idx(d, 0);
  std::vector<std::size_t> best_idx(d, 0);
  while (true) {
    double val = 0.0;
    for (std::size_t si = 0; si < ws.sup.size(); ++si) {
      double p = mu[si];
      for (std::size_t j = 0; j < d; ++j) p *= powered[j][idx[j]][si];
      val += p;
    }
    ++res.points;
    if (val > res.value) {
      res.value = val;
      best_idx = idx;
    }
    std::size_t j = 0;
    while (j < d) {
      if (++idx[j] < powered[j].size()) break;
      idx[j] = 0;
      ++j;
    }
    if (j == d) break;
  }

  res.argmax.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& c = comps[j][best_idx[j]];
    res.argmax[j].resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
      res.argmax[j][k] = static_cast<double>(c[k]) / n;
  }

  double bound = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double m = static_cast<double>(instance.families[j].key_count());
    if (m < 2) continue;
    bound += std::pow(std::min(1.0, 2.0 * (m - 1.0) / n), ws.exps[j]);
  }
  res.grid_bound = res.value * bound;
  return res;
}

void project_to_simplex(std::vector<double>& x) {
  const std::size_t m = x.size();
  if (m == 1) { x[0] = 1.0; return; }
  std::vector<double> u = x;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  for (double& v : x) v = std::max(v - tau, 0.0);
}

}  // namespace disent
