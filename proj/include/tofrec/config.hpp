#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "tofrec/errors.hpp"
#include "tofrec/measurement.hpp"
#include "tofrec/optimize.hpp"

namespace tofrec {

// ---------------------------------------------------------------------------
// Flat `key = value` run configuration. `[section]` lines and `#` comments
// are allowed for grouping but carry no meaning; keys are global and unique.
// Unknown keys are rejected. Lengths are configured in millimetres and
// converted to metres on parse.
// ---------------------------------------------------------------------------

struct RunConfig {
  // material
  double rho = 0.0, c = 0.0, k = 0.0, a = 0.0, b = 0.0;
  // lattice and horizon
  double tau = 0.0;
  int M = 100;
  int N = 500;
  double T0 = 26.0;
  // synthesis truth
  double L_true = 0.0;  ///< [m]
  FluxSpec q_true;
  bool has_q_true = false;
  double accuracy = 0.0;
  double temp_noise = 0.0;
  bool dither = false;
  int synth_refine = 2;
  // inversion start and bounds
  FluxSpec q0 = FluxSpec::constant(0.0);
  double L0 = 0.0;  ///< [m]
  bool has_L0 = false;
  double L_min = 1e-3;  ///< [m]
  double L_max = 0.5;   ///< [m]
  ObjectiveConfig obj;
  WolfeConfig wolfe;
  std::uint64_t seed = 0;

  std::set<std::string> provided;  ///< keys present in the file

  MaterialProps props() const { return MaterialProps{rho, c, k, a, b}; }

  /// Throws std::invalid_argument naming the first missing key.
  void require_keys(const std::set<std::string>& keys) const;
};

/// Parses a config file. Malformed lines or numbers throw ParseError naming
/// the line; unknown keys throw std::invalid_argument naming the key.
RunConfig parse_config(const std::string& path);

/// Column CSV `t_s,q_W_per_m2` holding a tabulated flux.
FluxSpec load_flux_table(const std::string& path);

}  // namespace tofrec
