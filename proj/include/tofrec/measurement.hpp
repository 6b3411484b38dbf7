#pragma once

#include <cstdint>
#include <string>

#include "tofrec/errors.hpp"
#include "tofrec/model.hpp"

namespace tofrec {

// ---------------------------------------------------------------------------
// Synthetic measurement generation and measurement file I/O.
//
// Truth is simulated on a finer grid than the inversion will ever use
// (refine x in both space and time by default) and restricted to the
// measurement instants, so a perfect inversion still faces discretisation
// mismatch. Time-of-flight readings are then quantised to the instrument
// accuracy.
// ---------------------------------------------------------------------------

/// True flux generator: a constant level or a table sampled on the
/// measurement instants (linearly interpolated in between).
struct FluxSpec {
  enum class Kind { Constant, Table };
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::vector<double> table;

  static FluxSpec constant(double v) { return FluxSpec{Kind::Constant, v, {}}; }
  static FluxSpec tabulated(std::vector<double> samples);

  /// Value at time t. A table spans [0, tau] uniformly at its own resolution
  /// and is clamped outside; it need not match any simulation grid.
  double at(double t, double tau) const;
  /// Dense samples on a grid with `steps` intervals over [0, tau].
  FluxProfile sample(double tau, int steps) const;
};

struct SynthesisSpec {
  FluxSpec true_q;
  double true_L = 0.0;      ///< [m]
  double T0 = 26.0;         ///< [C]
  double accuracy = 0.0;    ///< lambda quantisation step [s], 0 = exact
  double temp_noise = 0.0;  ///< Gaussian sigma added to the far-wall trace [C]
  bool dither = false;      ///< add uniform dither inside one quantum before rounding
  std::uint64_t seed = 0;
  int refine = 2;           ///< truth-grid refinement factor in space and time

  void validate() const;
};

/// Simulates the truth on the refined grid, restricts to the N+1 measurement
/// instants of the (tau, M, N) lattice and applies accuracy quantisation
/// (and, if configured, trace noise and dither). Provenance lands in meta.
MeasurementSet synthesize(const SynthesisSpec& spec, const MaterialProps& props,
                          double tau, int M, int N);

/// Rounds every sample to the nearest multiple of quantum, ties to even.
/// quantum = 0 returns the input unchanged.
TimeSeries quantize(const TimeSeries& series, double quantum);

/// Writes `path` as CSV (t_s,lambda_s,T_L_C) plus a `path + ".meta"` sidecar
/// holding accuracy and provenance as key = value lines. Lossless: lambda is
/// printed with enough digits to reproduce the double bit for bit.
void save_measurements(const std::string& path, const MeasurementSet& set);

/// Reads a measurement CSV and its sidecar (the sidecar may be absent, in
/// which case accuracy falls back to 0). Structural problems throw ParseError
/// naming the line.
MeasurementSet load_measurements(const std::string& path);

}  // namespace tofrec
