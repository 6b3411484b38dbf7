#include "tofrec/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tofrec {

namespace detail {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace detail

void MaterialProps::validate() const {
  detail::require(std::isfinite(rho) && rho > 0.0, "rho must be positive and finite");
  detail::require(std::isfinite(c) && c > 0.0, "c must be positive and finite");
  detail::require(std::isfinite(k) && k > 0.0, "k must be positive and finite");
  detail::require(std::isfinite(a), "a must be finite");
  detail::require(std::isfinite(b) && b > 0.0, "b must be positive and finite");
}

SimGrid make_grid(double L, double tau, int M, int N) {
  detail::require(std::isfinite(L) && L > 0.0, "L must be positive and finite");
  detail::require(std::isfinite(tau) && tau > 0.0, "tau must be positive and finite");
  detail::require(M >= 2, "M must be at least 2");
  detail::require(N >= 1, "N must be at least 1");
  return SimGrid{L, tau, M, N};
}

FluxProfile constant_flux(double value, int steps) {
  detail::require(steps >= 1, "steps must be at least 1");
  FluxProfile q;
  q.values.assign(static_cast<std::size_t>(steps) + 1, value);
  return q;
}

void MeasurementSet::validate() const {
  const std::size_t n = t.values.size();
  detail::require(n >= 2, "measurement set needs at least two instants");
  detail::require(lambda_m.values.size() == n, "lambda_m length must match t");
  detail::require(t_m.values.size() == n, "t_m length must match t");
  detail::require(std::isfinite(accuracy) && accuracy >= 0.0,
                  "accuracy must be non-negative and finite");
  detail::require(t.values.front() == 0.0, "instants must start at t = 0");
  for (std::size_t i = 1; i < n; ++i)
    detail::require(t.values[i] > t.values[i - 1], "instants must increase strictly");
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(std::isfinite(lambda_m.values[i]), "lambda_m must be finite");
    detail::require(std::isfinite(t_m.values[i]), "t_m must be finite");
  }
}

double trapz(const std::vector<double>& v, double step) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < n; ++i) acc += v[i];
  return acc * step;
}

double weighted_dot(const std::vector<double>& u, const std::vector<double>& v,
                    double step) {
  detail::require(u.size() == v.size(), "weighted_dot length mismatch");
  const std::size_t n = u.size();
  if (n < 2) return 0.0;
  double acc = 0.5 * (u.front() * v.front() + u.back() * v.back());
  for (std::size_t i = 1; i + 1 < n; ++i) acc += u[i] * v[i];
  return acc * step;
}

}  // namespace tofrec
