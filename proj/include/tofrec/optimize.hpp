#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tofrec/model.hpp"

namespace tofrec {

// ---------------------------------------------------------------------------
// Alternating minimisation of J(q, L): one Polak-Ribiere-Polyak conjugate
// gradient step on the flux per outer iteration, then either one Wolfe-Powell
// steepest-descent step on the thickness or, when L has stagnated, a decay of
// the trace-regularisation weight.
// ---------------------------------------------------------------------------

struct ObjectiveConfig {
  double alpha = 1e-2;         ///< initial trace-regularisation weight
  double crl = 5e-18;          ///< stop when J drops below this
  int n_max = 500;             ///< outer iteration cap
  double eps_stagnate = 1e-6;  ///< L stagnation threshold [m]
  double alpha_decay = 10.0;   ///< divisor applied to alpha on stagnation
  void validate() const;
};

struct WolfeConfig {
  double rho = 0.25;       ///< Armijo slope fraction, 0 < rho < sigma < 1
  double sigma = 0.75;     ///< curvature slope fraction
  double lambda_max = 0.0; ///< bracket upper bound; <= 0 lets the caller size it
  int max_bisections = 40; ///< bisection cap before a flagged best-effort return
  void validate() const;
};

/// Everything an inversion needs besides the current iterate.
struct InverseProblem {
  MaterialProps props;
  MeasurementSet meas;
  int spatial_cells = 100;  ///< M of the candidate grid (time grid follows meas)
  double initial_temp = 26.0;
  ObjectiveConfig obj;
  WolfeConfig wolfe;
  double L_min = 1e-3;  ///< clamp bounds for the thickness iterate [m]
  double L_max = 0.5;

  void validate() const;
  SimGrid grid_for(double L) const;
};

/// Objective value with the simulation by-products the gradient steps reuse.
/// j_trace_raw excludes the alpha weight: J = j_tof + alpha * j_trace_raw.
struct ObjectiveEval {
  double J = 0.0;
  double j_tof = 0.0;
  double j_trace_raw = 0.0;
  TemperatureField field;
  TimeSeries lambda;
  TimeSeries trace;
};

/// Simulates the candidate (q, L) on its own grid and accumulates both misfit
/// terms with trapezoid quadrature. Throws on invalid states (propagates
/// velocity domain errors from the time-of-flight evaluation).
ObjectiveEval objective(const InverseProblem& prob, const FluxProfile& q, double L,
                        double alpha);

/// Polak-Ribiere-Polyak coefficient over the flux coordinates. Returns
/// nullopt when the previous gradient is identically zero (convergence is
/// the caller's business, not a division by zero).
std::optional<double> prp_coefficient(const FluxProfile& g, const FluxProfile& g_prev);

struct CgState {
  FluxProfile g_prev;
  FluxProfile p_prev;
  bool have_prev = false;
};

struct CgDirection {
  FluxProfile p;
  double prp = 0.0;
  bool reset = false;  ///< true when the ascent safeguard forced p = -g
};

/// p = -g on the first call, -g + prp * p_prev afterwards, with a reset to -g
/// whenever the combined direction fails the descent test p.g < 0. Updates
/// state for the next call.
CgDirection cg_direction(const FluxProfile& g, CgState& state);

/// Exact line-search magnitude for the linearised residual model:
///   beta = <r, dlam> / <dlam, dlam>
/// with trapezoid-weighted inner products, r = lambda_sim - lambda_m and dlam
/// the time-of-flight response along the search direction. Returns nullopt
/// when dlam is identically zero.
std::optional<double> exact_step_q(const TimeSeries& lambda_sim,
                                   const TimeSeries& lambda_m,
                                   const TimeSeries& dlam, double dt);

struct WolfeResult {
  double step = 0.0;
  bool flagged = false;  ///< bisection cap hit; step is best-effort
  int evals = 0;
};

/// Wolfe-Powell bracket bisection on [0, lambda_max]. phi(lambda) returns
/// {value, derivative}; phi0/dphi0 describe lambda = 0 and dphi0 must be
/// negative. Stops at the first lambda satisfying
///   phi(lambda) <= phi0 + rho * lambda * dphi0   and
///   phi'(lambda) >= sigma * dphi0;
/// on hitting max_bisections returns the best Armijo-satisfying lambda seen
/// (0 if none), flagged.
WolfeResult wolfe_powell(const std::function<std::pair<double, double>(double)>& phi,
                         double phi0, double dphi0, const WolfeConfig& cfg);

struct SdStep {
  double L_new = 0.0;
  double d = 0.0;        ///< descent direction -dJ/dL
  double step = 0.0;     ///< accepted lambda
  bool flagged = false;
  bool clamped = false;
  bool mirrored = false; ///< step taken along +dJ/dL after the forward ray failed
  ObjectiveEval eval;    ///< evaluation at (q, L_new)
};

/// One steepest-descent update of L at fixed q. The search runs along the
/// negated thickness gradient; because that gradient is evaluated from the
/// boundary formula alone (the interior-field dependence is dropped), a ray
/// that yields no sufficient-decrease point is retried mirrored before the
/// step is declared stagnant. The bracket defaults to half of L per trial
/// unless the caller sizes lambda_max, and the result is clamped to
/// [L_min, L_max].
SdStep sd_step_L(const InverseProblem& prob, const FluxProfile& q, double L,
                 double alpha, const ObjectiveEval& at_L);

struct IterationRecord {
  int n = 0;
  double J = 0.0;
  double L = 0.0;
  double grad_l1 = 0.0;  ///< |dJ/dq| summed over samples
  double d = 0.0;        ///< -dJ/dL driving the search; 0 on decay iterations
  double alpha = 0.0;
  double beta = 0.0;     ///< flux step actually applied (signed)
  double lambda = 0.0;   ///< thickness step length (0 on decay iterations)
  std::string flags;     ///< semicolon-joined event tags, empty when clean
};

struct InversionResult {
  FluxProfile q;
  double L = 0.0;
  double J = 0.0;
  int iterations = 0;
  std::string stop_reason;  ///< "J<crl", "n_max" or "grad-floor"
  std::vector<IterationRecord> trajectory;  ///< row n = state after n iterations
};

/// Thrown when an accepted iterate stops being finite; carries the trajectory
/// so callers can still persist it.
struct DivergedError : std::runtime_error {
  DivergedError(const std::string& what, std::vector<IterationRecord> traj)
      : std::runtime_error(what), trajectory(std::move(traj)) {}
  std::vector<IterationRecord> trajectory;
};

/// Alternating driver. Stops when J < crl, the iteration cap is reached, or
/// both gradients vanish. J is non-increasing across iterations: flux steps
/// are kept only if they descend, thickness steps satisfy Armijo on the true
/// objective, and alpha decay can only shrink the trace term.
InversionResult alternate(const InverseProblem& prob, FluxProfile q0, double L0);

}  // namespace tofrec
