#include "tofrec/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cn_core.hpp"

namespace tofrec {

TemperatureField solve_heat(const MaterialProps& props, const SimGrid& grid,
                            const FluxProfile& q, double initial) {
  props.validate();
  detail::require(grid.L > 0.0 && grid.tau > 0.0 && grid.M >= 2 && grid.N >= 1,
                  "grid must come from make_grid");
  detail::require(q.size() == grid.instants(), "q must have N+1 samples");
  detail::require(std::isfinite(initial), "initial temperature must be finite");
  for (double v : q.values)
    detail::require(std::isfinite(v), "flux samples must be finite");

  const detail::CnOperator op(props, grid);
  // Flux enters through the ghost node of row 0: the semi-discrete source is
  // 2*q/(rho*c*h) e_0, integrated trapezoidally across the step.
  const double src = grid.dt() / (props.rho * props.c * grid.h());

  TemperatureField field(grid);
  double* col0 = field.slice(0);
  for (std::size_t j = 0; j < grid.nodes(); ++j) col0[j] = initial;

  for (int i = 0; i < grid.N; ++i) {
    const double* cur = field.slice(i);
    double* next = field.slice(i + 1);
    op.apply_explicit(cur, next);
    next[0] += src * (q[i] + q[i + 1]);
    op.solve_implicit(next);
  }
  return field;
}

TimeSeries time_of_flight(const TemperatureField& field, const MaterialProps& props) {
  props.validate();
  const SimGrid& grid = field.grid;
  detail::require(field.values.size() == grid.nodes() * grid.instants(),
                  "field storage inconsistent with its grid");

  TimeSeries lambda;
  lambda.unit = SeriesUnit::Seconds;
  lambda.values.resize(grid.instants());

  const int m = grid.M;
  const double two_h = 2.0 * grid.h();
  for (int i = 0; i <= grid.N; ++i) {
    const double* col = field.slice(i);
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double v = props.velocity(col[j]);
      if (!(v > 0.0))
        throw std::domain_error("velocity not positive at node " + std::to_string(j) +
                                ", instant " + std::to_string(i));
      acc += trap_weight(j, grid.nodes()) / v;
    }
    lambda.values[i] = two_h * acc;
  }
  return lambda;
}

TimeSeries boundary_trace(const TemperatureField& field) {
  const SimGrid& grid = field.grid;
  detail::require(field.values.size() == grid.nodes() * grid.instants(),
                  "field storage inconsistent with its grid");
  TimeSeries trace;
  trace.unit = SeriesUnit::Celsius;
  trace.values.resize(grid.instants());
  for (int i = 0; i <= grid.N; ++i) trace.values[i] = field.at(grid.M, i);
  return trace;
}

}  // namespace tofrec
