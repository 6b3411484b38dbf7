#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tofrec::detail {

// Thomas factorisation of a constant tridiagonal matrix, reused across the
// many right-hand sides of one time march. The Crank-Nicolson matrix here is
// strictly diagonally dominant, so no pivoting is needed; the zero-pivot
// guard only fires on malformed input.
class TridiagSolver {
 public:
  TridiagSolver(std::vector<double> lower, std::vector<double> diag,
                std::vector<double> upper)
      : lower_(std::move(lower)), cprime_(std::move(upper)), inv_(diag.size()) {
    const std::size_t n = diag.size();
    if (n == 0 || lower_.size() != n - 1 || cprime_.size() != n - 1)
      throw std::invalid_argument("tridiagonal band sizes inconsistent");
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("tridiagonal solve hit a zero pivot");
    inv_[0] = 1.0 / piv;
    for (std::size_t j = 1; j < n; ++j) {
      cprime_[j - 1] *= inv_[j - 1];
      piv = diag[j] - lower_[j - 1] * cprime_[j - 1];
      if (piv == 0.0) throw std::runtime_error("tridiagonal solve hit a zero pivot");
      inv_[j] = 1.0 / piv;
    }
  }

  std::size_t size() const { return inv_.size(); }

  // Overwrites rhs with the solution.
  void solve_in_place(double* rhs) const {
    const std::size_t n = inv_.size();
    rhs[0] *= inv_[0];
    for (std::size_t j = 1; j < n; ++j)
      rhs[j] = (rhs[j] - lower_[j - 1] * rhs[j - 1]) * inv_[j];
    for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= cprime_[j] * rhs[j + 1];
  }

 private:
  std::vector<double> lower_;   // sub-diagonal
  std::vector<double> cprime_;  // eliminated super-diagonal
  std::vector<double> inv_;     // reciprocal pivots
};

}  // namespace tofrec::detail
