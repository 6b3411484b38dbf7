#include "tofrec/optimize.hpp"

#include <cmath>
#include <limits>

#include "tofrec/adjoint.hpp"
#include "tofrec/forward.hpp"

namespace tofrec {

namespace {

double l1_norm(const FluxProfile& g) {
  double acc = 0.0;
  for (double v : g.values) acc += std::abs(v);
  return acc;
}

double dot(const FluxProfile& u, const FluxProfile& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u.values[i] * v.values[i];
  return acc;
}

void append_flag(std::string& flags, const char* tag) {
  if (!flags.empty()) flags += ';';
  flags += tag;
}

}  // namespace

void ObjectiveConfig::validate() const {
  detail::require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be non-negative");
  detail::require(std::isfinite(crl) && crl > 0.0, "crl must be positive");
  detail::require(n_max >= 1, "n_max must be at least 1");
  detail::require(std::isfinite(eps_stagnate) && eps_stagnate >= 0.0,
                  "eps_stagnate must be non-negative");
  detail::require(std::isfinite(alpha_decay) && alpha_decay > 1.0,
                  "alpha_decay must exceed 1");
}

void WolfeConfig::validate() const {
  detail::require(rho > 0.0 && rho < 1.0, "wolfe rho must lie in (0, 1)");
  detail::require(sigma > rho && sigma < 1.0, "wolfe sigma must lie in (rho, 1)");
  detail::require(max_bisections >= 1, "max_bisections must be at least 1");
  detail::require(std::isfinite(lambda_max), "lambda_max must be finite");
}

void InverseProblem::validate() const {
  props.validate();
  meas.validate();
  detail::require(spatial_cells >= 2, "spatial_cells must be at least 2");
  detail::require(std::isfinite(initial_temp), "initial_temp must be finite");
  obj.validate();
  wolfe.validate();
  detail::require(std::isfinite(L_min) && L_min > 0.0, "L_min must be positive");
  detail::require(std::isfinite(L_max) && L_max > L_min, "L_max must exceed L_min");
}

SimGrid InverseProblem::grid_for(double L) const {
  return make_grid(L, meas.tau(), spatial_cells, meas.steps());
}

ObjectiveEval objective(const InverseProblem& prob, const FluxProfile& q, double L,
                        double alpha) {
  prob.validate();
  detail::require(q.size() == prob.meas.t.values.size(), "q must have N+1 samples");
  detail::require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be non-negative");
  const SimGrid grid = prob.grid_for(L);

  ObjectiveEval ev;
  ev.field = solve_heat(prob.props, grid, q, prob.initial_temp);
  ev.lambda = time_of_flight(ev.field, prob.props);
  ev.trace = boundary_trace(ev.field);

  std::vector<double> r(grid.instants()), s(grid.instants());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = ev.lambda.values[i] - prob.meas.lambda_m.values[i];
    s[i] = ev.trace.values[i] - prob.meas.t_m.values[i];
  }
  ev.j_tof = 0.5 * weighted_dot(r, r, grid.dt());
  ev.j_trace_raw = 0.5 * weighted_dot(s, s, grid.dt());
  ev.J = ev.j_tof + alpha * ev.j_trace_raw;
  return ev;
}

std::optional<double> prp_coefficient(const FluxProfile& g, const FluxProfile& g_prev) {
  detail::require(g.size() == g_prev.size(), "gradient lengths must match");
  double denom = 0.0, num = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    denom += g_prev.values[i] * g_prev.values[i];
    num += g.values[i] * (g.values[i] - g_prev.values[i]);
  }
  if (denom == 0.0) return std::nullopt;
  return num / denom;
}

CgDirection cg_direction(const FluxProfile& g, CgState& state) {
  CgDirection out;
  if (!state.have_prev) {
    out.p.values.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.p.values[i] = -g.values[i];
  } else {
    const auto prp = prp_coefficient(g, state.g_prev);
    if (!prp) {
      out.reset = true;
      out.p.values.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) out.p.values[i] = -g.values[i];
    } else {
      out.prp = *prp;
      out.p.values.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i)
        out.p.values[i] = -g.values[i] + *prp * state.p_prev.values[i];
      if (dot(out.p, g) > 0.0) {  // ascent safeguard
        out.reset = true;
        for (std::size_t i = 0; i < g.size(); ++i) out.p.values[i] = -g.values[i];
      }
    }
  }
  state.g_prev = g;
  state.p_prev = out.p;
  state.have_prev = true;
  return out;
}

std::optional<double> exact_step_q(const TimeSeries& lambda_sim,
                                   const TimeSeries& lambda_m,
                                   const TimeSeries& dlam, double dt) {
  const std::size_t n = lambda_sim.values.size();
  detail::require(lambda_m.values.size() == n && dlam.values.size() == n,
                  "series lengths must match");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = lambda_sim.values[i] - lambda_m.values[i];
  const double denom = weighted_dot(dlam.values, dlam.values, dt);
  if (denom == 0.0) return std::nullopt;
  return weighted_dot(r, dlam.values, dt) / denom;
}

WolfeResult wolfe_powell(const std::function<std::pair<double, double>(double)>& phi,
                         double phi0, double dphi0, const WolfeConfig& cfg) {
  cfg.validate();
  detail::require(cfg.lambda_max > 0.0, "lambda_max must be positive");
  detail::require(std::isfinite(phi0), "phi0 must be finite");
  detail::require(std::isfinite(dphi0) && dphi0 < 0.0, "dphi0 must be negative");

  WolfeResult res;
  double a = 0.0, b = cfg.lambda_max;
  double best = 0.0, best_val = phi0;
  bool have_best = false;

  for (int it = 0; it < cfg.max_bisections; ++it) {
    const double lam = 0.5 * (a + b);
    const auto [val, slope] = phi(lam);
    ++res.evals;
    if (val <= phi0 + cfg.rho * lam * dphi0) {
      if (!have_best || val < best_val) {
        best = lam;
        best_val = val;
        have_best = true;
      }
      if (slope >= cfg.sigma * dphi0) {
        res.step = lam;
        return res;
      }
      a = lam;  // sufficient decrease but still too steep: move right
    } else {
      b = lam;  // overshoot: move left
    }
  }
  res.step = have_best ? best : 0.0;
  res.flagged = true;
  return res;
}

namespace {

// Trial evaluation that treats physically out-of-range states (velocity
// non-positive somewhere) or non-finite objectives as "reject", not as a
// hard failure of the whole inversion.
std::optional<ObjectiveEval> try_objective(const InverseProblem& prob,
                                           const FluxProfile& q, double L,
                                           double alpha) {
  try {
    ObjectiveEval ev = objective(prob, q, L, alpha);
    if (!std::isfinite(ev.J)) return std::nullopt;
    return ev;
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

}  // namespace

SdStep sd_step_L(const InverseProblem& prob, const FluxProfile& q, double L,
                 double alpha, const ObjectiveEval& at_L) {
  SdStep out;
  out.L_new = L;
  out.eval = at_L;
  out.d = -gradient_L(at_L.lambda, prob.meas.lambda_m, at_L.field, prob.props);
  if (out.d == 0.0) return out;

  // Bracket sizing: a caller-provided lambda_max is used as-is so the search
  // can land inside the Wolfe window of the one-dimensional minimiser even
  // from a far start; when unset, default to never letting one trial move
  // the thickness by more than half of itself. Unphysical probes are
  // rejected inside phi and the accepted state is clamped below either way.
  WolfeConfig local = prob.wolfe;
  local.lambda_max = prob.wolfe.lambda_max > 0.0
                         ? prob.wolfe.lambda_max
                         : 0.5 * L / std::abs(out.d);

  auto phi_along = [&](double dir) {
    return [&prob, &q, &at_L, L, alpha, dir](double lam) -> std::pair<double, double> {
      const double L_try = L + lam * dir;
      if (!std::isfinite(L_try) || L_try <= 0.0)
        return {std::numeric_limits<double>::infinity(), 0.0};
      const auto ev = try_objective(prob, q, L_try, alpha);
      if (!ev) return {std::numeric_limits<double>::infinity(), 0.0};
      const double slope =
          gradient_L(ev->lambda, prob.meas.lambda_m, ev->field, prob.props) * dir;
      return {ev->J, slope};
    };
  };

  double dir = out.d;
  WolfeResult wr = wolfe_powell(phi_along(dir), at_L.J, -out.d * out.d, local);
  if (wr.step == 0.0) {
    // No sufficient-decrease point along the whole forward ray means the
    // boundary-only gradient formula carries the wrong sign at this state
    // (its dropped interior terms dominate); probe the mirrored ray before
    // conceding that the thickness has stagnated.
    const WolfeResult wm = wolfe_powell(phi_along(-dir), at_L.J, -out.d * out.d, local);
    if (wm.step != 0.0) {
      wr = wm;
      dir = -dir;
      out.mirrored = true;
    }
  }
  out.flagged = wr.flagged;
  if (wr.step == 0.0) return out;

  double L_new = L + wr.step * dir;
  if (L_new < prob.L_min || L_new > prob.L_max) {
    out.clamped = true;
    L_new = std::min(std::max(L_new, prob.L_min), prob.L_max);
  }
  auto ev = try_objective(prob, q, L_new, alpha);
  if (!ev || ev->J > at_L.J) {
    // Clamping (or a flagged best-effort step) must not break monotonicity.
    out.flagged = true;
    return out;
  }
  out.L_new = L_new;
  out.step = wr.step;
  out.eval = std::move(*ev);
  return out;
}

InversionResult alternate(const InverseProblem& prob, FluxProfile q, double L0) {
  prob.validate();
  detail::require(q.size() == prob.meas.t.values.size(), "q0 must have N+1 samples");
  detail::require(std::isfinite(L0) && L0 >= prob.L_min && L0 <= prob.L_max,
                  "L0 must lie within [L_min, L_max]");

  double L = L0;
  double alpha = prob.obj.alpha;
  ObjectiveEval eval = objective(prob, q, L, alpha);
  CgState cg;
  std::vector<IterationRecord> records;
  double L_prev = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  std::string stop;

  auto gradients = [&](const ObjectiveEval& ev, double Lcur,
                       double al) -> std::pair<FluxProfile, double> {
    const Field2D src = assemble_source(ev.lambda, prob.meas.lambda_m, ev.trace,
                                        prob.meas.t_m, ev.field, prob.props, al);
    const AdjointField mu = solve_adjoint(prob.props, prob.grid_for(Lcur), src);
    const double djdl = gradient_L(ev.lambda, prob.meas.lambda_m, ev.field, prob.props);
    return {gradient_q(mu), -djdl};
  };

  auto [g, d] = gradients(eval, L, alpha);
  records.push_back({0, eval.J, L, l1_norm(g), d, alpha, 0.0, 0.0, ""});

  while (true) {
    if (!std::isfinite(eval.J) || !std::isfinite(L))
      throw DivergedError("objective or thickness became non-finite", records);
    if (eval.J < prob.obj.crl) {
      stop = "J<crl";
      break;
    }
    if (n >= prob.obj.n_max) {
      stop = "n_max";
      break;
    }
    if (l1_norm(g) == 0.0 && d == 0.0) {
      stop = "grad-floor";
      break;
    }
    ++n;
    std::string flags;

    // -- one conjugate-gradient step on the flux ---------------------------
    double beta_applied = 0.0;
    if (l1_norm(g) > 0.0) {
      const CgDirection dir = cg_direction(g, cg);
      if (dir.reset) append_flag(flags, "cg-reset");
      const TemperatureField sens =
          solve_sensitivity(prob.props, prob.grid_for(L), dir.p);
      const TimeSeries dlam = delta_lambda(sens, eval.field, prob.props);
      const auto beta =
          exact_step_q(eval.lambda, prob.meas.lambda_m, dlam, prob.grid_for(L).dt());
      if (beta && *beta != 0.0) {
        // The linearised model says q - beta*p; keep whichever signed step
        // actually descends the full objective.
        bool accepted = false;
        for (const double coeff : {-*beta, *beta}) {
          FluxProfile trial = q;
          for (std::size_t i = 0; i < trial.size(); ++i)
            trial.values[i] += coeff * dir.p.values[i];
          auto ev = try_objective(prob, trial, L, alpha);
          if (ev && ev->J <= eval.J) {
            q = std::move(trial);
            eval = std::move(*ev);
            beta_applied = coeff;
            accepted = true;
            break;
          }
        }
        if (!accepted) append_flag(flags, "q-step-rejected");
      } else {
        append_flag(flags, "q-step-degenerate");
      }
    } else {
      append_flag(flags, "q-grad-zero");
    }

    // -- one steepest-descent step on the thickness, or alpha decay --------
    double lambda_applied = 0.0;
    const bool stagnated =
        !std::isnan(L_prev) && std::abs(L - L_prev) <= prob.obj.eps_stagnate;
    if (!stagnated) {
      L_prev = L;
      SdStep sd = sd_step_L(prob, q, L, alpha, eval);
      if (sd.d == 0.0) {
        append_flag(flags, "L-grad-zero");
      } else {
        if (sd.flagged) append_flag(flags, "wolfe-cap");
        if (sd.clamped) append_flag(flags, "L-clamped");
        if (sd.mirrored) append_flag(flags, "L-mirrored");
        if (sd.step != 0.0) {
          L = sd.L_new;
          eval = std::move(sd.eval);
          lambda_applied = sd.step;
        }
      }
    } else {
      alpha /= prob.obj.alpha_decay;
      eval.J = eval.j_tof + alpha * eval.j_trace_raw;
      append_flag(flags, "alpha-decay");
    }

    std::tie(g, d) = gradients(eval, L, alpha);
    // A stagnation iteration runs no thickness search, so its record carries
    // d = 0: the convergence measure counts only directions the iteration
    // actually used. Searches recompute the value fresh each time.
    if (stagnated) d = 0.0;
    records.push_back(
        {n, eval.J, L, l1_norm(g), d, alpha, beta_applied, lambda_applied, flags});
  }

  InversionResult res;
  res.q = std::move(q);
  res.L = L;
  res.J = eval.J;
  res.iterations = n;
  res.stop_reason = stop;
  res.trajectory = std::move(records);
  return res;
}

}  // namespace tofrec
