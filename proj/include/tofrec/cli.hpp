#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tofrec/config.hpp"
#include "tofrec/optimize.hpp"

namespace tofrec {

// Process exit codes. Anything not covered below (internal logic errors)
// exits with kExitCheckFailed as a generic failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitDiverged = 4;
inline constexpr int kExitIo = 5;

/// One inversion start per accuracy level. `accuracies` comes from a single
/// `accuracy = a, b, ...` line; each `cell = q0, L0_mm` line appends to
/// `cells` (stored in SI: W/m^2 and metres).
struct SweepMatrix {
  std::vector<double> accuracies;
  std::vector<std::pair<double, double>> cells;
};

SweepMatrix parse_matrix(const std::string& path);

/// Writers shared by invert and sweep. Columns are fixed so downstream
/// tooling can diff runs byte for byte.
void write_trajectory_csv(const std::string& path,
                          const std::vector<IterationRecord>& rows);
void write_flux_csv(const std::string& path, const SimGrid& grid,
                    const FluxProfile& q);

/// Subcommand bodies. Each returns a process exit code; validation and
/// parse failures propagate as exceptions for run_cli to map.
int cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
int cmd_invert(const RunConfig& cfg, const std::string& out_dir,
               const std::string& measurements_path);
int cmd_gradcheck(const RunConfig& cfg, const std::string& out_dir,
                  bool corrupt_source);
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir,
              const std::string& matrix_path);

/// Full argv-to-exit-code entry point (argument parsing, dispatch and
/// exception mapping). main() is a one-liner over this so tests can drive
/// the binary in-process.
int run_cli(int argc, const char* const* argv);

}  // namespace tofrec
