#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellphase/sim.hpp"

namespace bellphase::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string &what) : std::invalid_argument(what) {}
};

enum class Command { Single, Sweep, Chsh, Scan, Verify };
enum class Format { Csv, Json };

// Resolved command-line request. Angles are in degrees here and nowhere else.
struct RunSpec {
  Command command = Command::Single;
  bool analytic = false;
  std::optional<sim::ModelKind> model;  // unset: phase (analytic) or all three (analytic scan)
  double phi1_deg = 0.0;
  double phi2_deg = 0.0;
  double phi1p_deg = 0.0;
  double phi2p_deg = 0.0;
  double delta_deg = 0.0;
  double phi0_deg = 0.0;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> partitions;  // unset: available processors, capped at trials
  double start_deg = 0.0;                   // sweep
  double stop_deg = 90.0;                   // sweep
  double step_deg = 1.0;                    // sweep and scan grid
  Format format = Format::Csv;
  std::string out_path;  // empty: standard output
};

// Plain numeric table; rendered as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  nlohmann::json config;
  nlohmann::json results;
  nlohmann::json checks = nlohmann::json::array();
  Table table;
  // Verify writes its own CSV (check names are text); other commands leave it empty.
  std::string csv_override;
  int exit_code = kExitOk;
};

double deg_to_rad(double deg);

Report cmd_single(const RunSpec &spec);
Report cmd_sweep(const RunSpec &spec);
Report cmd_chsh(const RunSpec &spec);
Report cmd_scan(const RunSpec &spec);
Report cmd_verify(const RunSpec &spec);

// Best |S| over a square grid of settings {0, step, 2 step, ...} below 180 degrees,
// all four CHSH angles ranging over the grid.
struct ScanResult {
  sim::ModelKind model = sim::ModelKind::PhaseModel;
  bool monte_carlo = false;
  std::size_t grid_points = 0;  // per angle
  std::array<double, 4> argmax_deg{};  // phi1, phi1', phi2, phi2'
  double s = 0.0;                      // signed S at the argmax
  double std_err = 0.0;                // at the argmax; 0 for analytic
  // max over the grid of |S| - (2 + 5 std_err); only meaningful for Monte Carlo
  double max_classical_excess = 0.0;
};

/// Throws UsageError for step <= 0 or grids over 1e8 quadruples.
ScanResult scan_grid(sim::ModelKind model, double step_deg,
                     const std::optional<sim::ExperimentConfig> &monte_carlo);

std::string render_csv(const Report &report);
std::string render_json(const Report &report);

/// Parses `args` (without the program name), runs the command and writes the
/// rendered report. Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace bellphase::cli
