#include "tofrec/adjoint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cn_core.hpp"
#include "tofrec/forward.hpp"

namespace tofrec {

namespace {

void check_series(const TimeSeries& ts, std::size_t n, const char* name) {
  detail::require(ts.values.size() == n, std::string(name) + " must have N+1 samples");
}

}  // namespace

Field2D assemble_source(const TimeSeries& lambda_sim, const TimeSeries& lambda_m,
                        const TimeSeries& trace, const TimeSeries& t_m,
                        const TemperatureField& field, const MaterialProps& props,
                        double alpha) {
  props.validate();
  const SimGrid& grid = field.grid;
  const std::size_t n = grid.instants();
  check_series(lambda_sim, n, "lambda_sim");
  check_series(lambda_m, n, "lambda_m");
  check_series(trace, n, "trace");
  check_series(t_m, n, "t_m");
  detail::require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be non-negative");

  Field2D source(grid);
  for (int i = 0; i <= grid.N; ++i) {
    const double r = lambda_sim[i] - lambda_m[i];
    const double mismatch = (alpha / grid.L) * (trace[i] - t_m[i]);
    const double* temp = field.slice(i);
    double* out = source.slice(i);
    for (int j = 0; j <= grid.M; ++j) {
      const double v = props.velocity(temp[j]);
      if (!(v > 0.0))
        throw std::domain_error("velocity not positive at node " + std::to_string(j) +
                                ", instant " + std::to_string(i));
      out[j] = 2.0 * r * props.a / (v * v) - mismatch;
    }
  }
  return source;
}

AdjointField solve_adjoint(const MaterialProps& props, const SimGrid& grid,
                           const Field2D& source) {
  props.validate();
  detail::require(source.grid.M == grid.M && source.grid.N == grid.N &&
                      source.values.size() == grid.nodes() * grid.instants(),
                  "source shape must match the grid");

  // Transpose of the forward march under the trapezoid inner products: run
  // the same Crank-Nicolson operator in reversed time and inject the source
  // of original instant n wholly at its arrival level, weighted by the time
  // quadrature weight. Moving the source inside the implicit solve is what
  // keeps the pairing <dT, S> = -<dq, gradient_q> exact in exact arithmetic.
  const detail::CnOperator op(props, grid);
  const double dt = grid.dt();
  const double inv_rc = 1.0 / (props.rho * props.c);
  const std::size_t nodes = grid.nodes();

  AdjointField mu(grid);  // column 0 stays zero
  std::vector<double> state(nodes, 0.0), work(nodes);

  for (int m = 0; m < grid.N; ++m) {
    const int n = grid.N - m;  // original instant whose source lands now
    const double w = dt * trap_weight(static_cast<std::size_t>(n), grid.instants());
    op.apply_explicit(state.data(), work.data());
    const double* src = source.slice(n);
    for (std::size_t j = 0; j < nodes; ++j) work[j] -= w * src[j];
    op.solve_implicit(work.data());
    state = work;
    double* out = mu.slice(m + 1);
    for (std::size_t j = 0; j < nodes; ++j) out[j] = state[j] * inv_rc;
  }
  return mu;
}

FluxProfile gradient_q(const AdjointField& mu) {
  const SimGrid& grid = mu.grid;
  detail::require(mu.values.size() == grid.nodes() * grid.instants(),
                  "adjoint field storage inconsistent with its grid");
  const int n = grid.N;
  FluxProfile g;
  g.values.resize(grid.instants());
  g[0] = mu.at(0, n);
  for (int i = 1; i < n; ++i) g[i] = 0.5 * (mu.at(0, n - i) + mu.at(0, n - i + 1));
  g[n] = mu.at(0, 1);
  return g;
}

double gradient_L(const TimeSeries& lambda_sim, const TimeSeries& lambda_m,
                  const TemperatureField& field, const MaterialProps& props) {
  props.validate();
  const SimGrid& grid = field.grid;
  const std::size_t n = grid.instants();
  check_series(lambda_sim, n, "lambda_sim");
  check_series(lambda_m, n, "lambda_m");

  std::vector<double> integrand(n);
  for (int i = 0; i <= grid.N; ++i) {
    const double v = props.velocity(field.at(grid.M, i));
    if (!(v > 0.0))
      throw std::domain_error("velocity not positive at node " +
                              std::to_string(grid.M) + ", instant " + std::to_string(i));
    integrand[i] = 2.0 * (lambda_sim[i] - lambda_m[i]) / v;
  }
  return trapz(integrand, grid.dt());
}

TemperatureField solve_sensitivity(const MaterialProps& props, const SimGrid& grid,
                                   const FluxProfile& direction) {
  return solve_heat(props, grid, direction, 0.0);
}

TimeSeries delta_lambda(const TemperatureField& sens, const TemperatureField& base,
                        const MaterialProps& props) {
  props.validate();
  const SimGrid& grid = base.grid;
  detail::require(sens.grid.M == grid.M && sens.grid.N == grid.N,
                  "sensitivity and base fields must share the grid shape");

  TimeSeries dlam;
  dlam.unit = SeriesUnit::Seconds;
  dlam.values.resize(grid.instants());
  const double two_h = 2.0 * grid.h();
  for (int i = 0; i <= grid.N; ++i) {
    const double* dT = sens.slice(i);
    const double* T = base.slice(i);
    double acc = 0.0;
    for (int j = 0; j <= grid.M; ++j) {
      const double v = props.velocity(T[j]);
      if (!(v > 0.0))
        throw std::domain_error("velocity not positive at node " + std::to_string(j) +
                                ", instant " + std::to_string(i));
      acc += trap_weight(j, grid.nodes()) * props.a * dT[j] / (v * v);
    }
    dlam.values[i] = -two_h * acc;
  }
  return dlam;
}

namespace {

double fd_step(double coordinate, double fallback_scale) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(std::abs(coordinate), fallback_scale);
  return std::sqrt(eps) * scale;
}

}  // namespace

double fd_gradient_q(const ScalarObjective& J, const FluxProfile& q, double L,
                     int component, double step) {
  detail::require(component >= 0 && static_cast<std::size_t>(component) < q.size(),
                  "component out of range");
  double scale = 1.0;
  for (double v : q.values) scale = std::max(scale, std::abs(v));
  const double h = step > 0.0 ? step : fd_step(q[component], 0.01 * scale);
  FluxProfile qp = q, qm = q;
  qp[component] += h;
  qm[component] -= h;
  return (J(qp, L) - J(qm, L)) / (2.0 * h);
}

double fd_gradient_L(const ScalarObjective& J, const FluxProfile& q, double L,
                     double step) {
  detail::require(L > 0.0, "L must be positive");
  const double h = step > 0.0 ? step : fd_step(L, L);
  return (J(q, L + h) - J(q, L - h)) / (2.0 * h);
}

}  // namespace tofrec
