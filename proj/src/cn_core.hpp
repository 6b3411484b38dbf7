#pragma once

#include "tofrec/model.hpp"
#include "tridiag.hpp"

namespace tofrec::detail {

// Shared Crank-Nicolson machinery for the heat, sensitivity and adjoint
// marches. With s = k*dt / (2*rho*c*h^2) the scheme is
//
//   (I - s*A) u^{i+1} = (I + s*A) u^i + step sources
//
// where A is the second-difference matrix closed with ghost nodes:
// row 0 = (-2, 2), interior rows = (1, -2, 1), row M = (2, -2). A annihilates
// constants exactly, and h*diag(1/2,1,...,1,1/2)*A is symmetric; both facts
// are load-bearing (uniform-state preservation, discrete adjoint identity).
class CnOperator {
 public:
  CnOperator(const MaterialProps& props, const SimGrid& grid)
      : grid_(grid),
        s_(props.k * grid.dt() / (2.0 * props.rho * props.c * grid.h() * grid.h())),
        implicit_(make_solver(grid, s_)) {}

  double s() const { return s_; }

  // out = (I + s*A) * in; out and in must not alias.
  void apply_explicit(const double* in, double* out) const {
    const int m = grid_.M;
    out[0] = (1.0 - 2.0 * s_) * in[0] + 2.0 * s_ * in[1];
    for (int j = 1; j < m; ++j)
      out[j] = s_ * in[j - 1] + (1.0 - 2.0 * s_) * in[j] + s_ * in[j + 1];
    out[m] = 2.0 * s_ * in[m - 1] + (1.0 - 2.0 * s_) * in[m];
  }

  // Solves (I - s*A) x = rhs in place.
  void solve_implicit(double* rhs) const { implicit_.solve_in_place(rhs); }

 private:
  static TridiagSolver make_solver(const SimGrid& grid, double s) {
    const std::size_t n = grid.nodes();
    std::vector<double> lower(n - 1, -s), diag(n, 1.0 + 2.0 * s), upper(n - 1, -s);
    upper.front() = -2.0 * s;
    lower.back() = -2.0 * s;
    return TridiagSolver(std::move(lower), std::move(diag), std::move(upper));
  }

  SimGrid grid_;
  double s_;
  TridiagSolver implicit_;
};

}  // namespace tofrec::detail
