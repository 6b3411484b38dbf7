#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tofrec {

// ---------------------------------------------------------------------------
// Domain value types shared by every other module.
//
// Unit policy: strict SI internally (m, s, kg, W, degrees Celsius for
// temperature). Lengths cross into millimetres only at the reporting and
// configuration boundary.
// ---------------------------------------------------------------------------

/// Thermal constants of the wall plus the acoustic velocity calibration
/// V(T) = a*T + b.
struct MaterialProps {
  double rho = 0.0;  ///< density [kg/m^3]
  double c = 0.0;    ///< specific heat [J/(kg C)]
  double k = 0.0;    ///< conductivity [W/(m C)]
  double a = 0.0;    ///< velocity slope [m/(s C)], may be negative or zero
  double b = 0.0;    ///< velocity offset [m/s]

  double velocity(double temperature) const { return a * temperature + b; }
  double diffusivity() const { return k / (rho * c); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Uniform space-time lattice for one candidate thickness.
/// Nodes x_j = j*L/M (j = 0..M), instants t_i = i*tau/N (i = 0..N).
struct SimGrid {
  double L = 0.0;    ///< wall thickness [m]
  double tau = 0.0;  ///< time horizon [s]
  int M = 0;         ///< spatial cells (M+1 nodes)
  int N = 0;         ///< time steps (N+1 instants)

  double h() const { return L / M; }
  double dt() const { return tau / N; }
  double node(int j) const { return j * (L / M); }
  double instant(int i) const { return i * (tau / N); }
  std::size_t nodes() const { return static_cast<std::size_t>(M) + 1; }
  std::size_t instants() const { return static_cast<std::size_t>(N) + 1; }
};

/// Validating factory for SimGrid. Throws std::invalid_argument naming the
/// offending argument (L, tau, M or N).
SimGrid make_grid(double L, double tau, int M, int N);

enum class SeriesUnit { Seconds, Celsius, WattsPerM2, Dimensionless };

/// A sampled function of time on the grid instants (length N+1).
struct TimeSeries {
  SeriesUnit unit = SeriesUnit::Dimensionless;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Boundary heat flux sampled on the grid instants [W/m^2], length N+1.
struct FluxProfile {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

FluxProfile constant_flux(double value, int steps);

/// Dense nodal field on a SimGrid: entry (j, i) lives at node x_j and
/// instant t_i. Stored instant-major so that one time slice is contiguous.
struct Field2D {
  SimGrid grid;
  std::vector<double> values;  // values[i*(M+1) + j]

  Field2D() = default;
  explicit Field2D(const SimGrid& g)
      : grid(g), values(g.nodes() * g.instants(), 0.0) {}

  double at(int j, int i) const {
    return values[static_cast<std::size_t>(i) * grid.nodes() + j];
  }
  double& at(int j, int i) {
    return values[static_cast<std::size_t>(i) * grid.nodes() + j];
  }
  double* slice(int i) { return values.data() + static_cast<std::size_t>(i) * grid.nodes(); }
  const double* slice(int i) const {
    return values.data() + static_cast<std::size_t>(i) * grid.nodes();
  }
};

// Temperature solutions and adjoint states share the storage layout; the
// aliases keep call sites honest about which one they hold.
using TemperatureField = Field2D;
using AdjointField = Field2D;

/// One pulse-echo data set: instants, time-of-flight readings and far-wall
/// temperature trace, all of equal length.
struct MeasurementSet {
  TimeSeries t;         ///< instants [s]
  TimeSeries lambda_m;  ///< measured time of flight [s]
  TimeSeries t_m;       ///< measured far-wall temperature [C]
  double accuracy = 0.0;  ///< quantisation step applied to lambda_m [s], 0 = exact
  std::map<std::string, std::string> meta;  ///< provenance key/value pairs

  void validate() const;
  double tau() const { return t.values.empty() ? 0.0 : t.values.back(); }
  int steps() const { return static_cast<int>(t.values.size()) - 1; }
};

// ---------------------------------------------------------------------------
// Quadrature helpers. Trapezoid weights are the single integration rule used
// across the project; endpoint weight is 1/2.
// ---------------------------------------------------------------------------

/// Trapezoid weight of sample i in a series of n samples (1/2 at both ends).
inline double trap_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

/// step * sum_i w_i v_i
double trapz(const std::vector<double>& v, double step);

/// step * sum_i w_i u_i v_i
double weighted_dot(const std::vector<double>& u, const std::vector<double>& v,
                    double step);

namespace detail {
/// Throws std::invalid_argument("<what>") when cond is false.
void require(bool cond, const std::string& what);
}  // namespace detail

}  // namespace tofrec
