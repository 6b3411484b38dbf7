#pragma once

#include "tofrec/model.hpp"

namespace tofrec {

// ---------------------------------------------------------------------------
// Direct problem: one-sided heated wall, insulated far side.
//
//   rho*c dT/dt = d/dx (k dT/dx)        on (0, L) x (0, tau]
//   -k dT/dx|_{x=0} = q(t),  -k dT/dx|_{x=L} = 0,  T|_{t=0} = T0
//
// Crank-Nicolson in time, second-order central differences in space, Neumann
// boundaries closed with ghost nodes so the boundary rows stay second order.
// One tridiagonal solve per step.
// ---------------------------------------------------------------------------

/// Marches the heat equation. q must have N+1 samples (one per instant).
/// Column 0 of the result is the uniform initial condition.
TemperatureField solve_heat(const MaterialProps& props, const SimGrid& grid,
                            const FluxProfile& q, double initial);

/// Pulse-echo round-trip time per instant:
///   Lambda(t_i) = 2 * integral_0^L dx / V(T(x, t_i))
/// evaluated with trapezoid quadrature on the field's own grid.
/// Throws std::domain_error naming node and instant if V(T) <= 0 anywhere.
TimeSeries time_of_flight(const TemperatureField& field, const MaterialProps& props);

/// Far-wall trace T(L, t_i), one value per instant [C].
TimeSeries boundary_trace(const TemperatureField& field);

}  // namespace tofrec
