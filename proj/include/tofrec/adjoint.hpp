#pragma once

#include <functional>

#include "tofrec/model.hpp"

namespace tofrec {

// ---------------------------------------------------------------------------
// Adjoint-state machinery for the gradients of
//
//   J(q, L) = 1/2 int (Lambda_L - Lambda_m)^2 dt
//           + alpha/2 int (T(L,t) - T_m)^2 dt.
//
// The reversed adjoint state mu solves
//
//   rho*c dmu/dt = d/dx (k dmu/dx) - S(x, tau - t),  mu(x, 0) = 0,
//
// forward in t with zero-flux boundaries; dJ/dq(t) is read off mu(0, tau-t).
// The march is the exact discrete transpose of the forward Crank-Nicolson
// scheme, so the inner-product identity between sensitivity and adjoint
// solves holds to machine precision (see solve_adjoint).
// ---------------------------------------------------------------------------

/// Misfit source field driving the adjoint march:
///   S(x_j, t_i) = 2*(Lambda(t_i) - Lambda_m(t_i)) * a / V(T(x_j,t_i))^2
///               - (alpha / L) * (T(L,t_i) - T_m(t_i))
/// The far-wall mismatch is distributed uniformly over the nodes, scaled by
/// 1/L; its sign is fixed so that the resulting flux gradient descends the
/// trace misfit (verified against the finite-difference oracle).
Field2D assemble_source(const TimeSeries& lambda_sim, const TimeSeries& lambda_m,
                        const TimeSeries& trace, const TimeSeries& t_m,
                        const TemperatureField& field, const MaterialProps& props,
                        double alpha);

/// Adjoint march. Column 0 of the result is identically zero (the transformed
/// terminal condition); column m >= 1 holds the transposed state after the
/// sources of instants N, N-1, ..., N-m+1 have been injected.
AdjointField solve_adjoint(const MaterialProps& props, const SimGrid& grid,
                           const Field2D& source);

/// Flux gradient samples dJ/dq(t_i), read from node 0 of mu at reversed,
/// time-staggered instants:
///   g_0 = mu(0, N),  g_i = (mu(0, N-i) + mu(0, N-i+1))/2,  g_N = mu(0, 1).
/// The staggering makes trapezoid-weighted pairing with a flux perturbation
/// reproduce the discrete directional derivative of J exactly.
FluxProfile gradient_q(const AdjointField& mu);

/// Thickness gradient, boundary (Leibniz) term only:
///   dJ/dL = int_0^tau 2*(Lambda(t) - Lambda_m(t)) / V(T(L,t)) dt
/// by trapezoid quadrature. The interior thermal contribution to dLambda/dL
/// is deliberately not modelled; fd_gradient quantifies the gap.
double gradient_L(const TimeSeries& lambda_sim, const TimeSeries& lambda_m,
                  const TemperatureField& field, const MaterialProps& props);

/// Linearised temperature response to a flux perturbation: same march as
/// solve_heat but with a zero initial condition.
TemperatureField solve_sensitivity(const MaterialProps& props, const SimGrid& grid,
                                   const FluxProfile& direction);

/// First-order time-of-flight response along a temperature perturbation:
///   dLambda(t_i) = -2 int a * dT(x,t_i) / V(T_base(x,t_i))^2 dx.
TimeSeries delta_lambda(const TemperatureField& sens, const TemperatureField& base,
                        const MaterialProps& props);

/// Scalar objective evaluator used by the finite-difference oracles:
/// maps (q, L) to J.
using ScalarObjective = std::function<double(const FluxProfile&, double)>;

/// Central finite difference of J in flux coordinate `component`.
/// step <= 0 picks sqrt(machine epsilon) scaled by the coordinate magnitude.
double fd_gradient_q(const ScalarObjective& J, const FluxProfile& q, double L,
                     int component, double step = 0.0);

/// Central finite difference of J in L.
double fd_gradient_L(const ScalarObjective& J, const FluxProfile& q, double L,
                     double step = 0.0);

}  // namespace tofrec
