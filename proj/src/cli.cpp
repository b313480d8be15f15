#include "bellphase/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bellphase/checks.hpp"
#include "bellphase/model.hpp"

namespace bellphase::cli {

namespace {

using nlohmann::json;

constexpr double kMaxScanQuadruples = 1e8;
constexpr std::uint64_t kMaxSweepRows = 10000000;

const char *command_name(Command c) {
  switch (c) {
    case Command::Single:
      return "single";
    case Command::Sweep:
      return "sweep";
    case Command::Chsh:
      return "chsh";
    case Command::Scan:
      return "scan";
    case Command::Verify:
      return "verify";
  }
  return "?";
}

std::uint64_t resolve_partitions(const RunSpec &spec) {
  if (spec.partitions) return *spec.partitions;
  const std::uint64_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::uint64_t>(1, std::min(hw, spec.trials));
}

void require_monte_carlo_args(const RunSpec &spec) {
  if (spec.trials == 0) throw UsageError("--trials must be a positive count");
  if (spec.partitions && *spec.partitions == 0) throw UsageError("--partitions must be positive");
}

model::PairSourceSpec source_of(const RunSpec &spec) {
  return {deg_to_rad(spec.delta_deg), deg_to_rad(spec.phi0_deg)};
}

sim::ExperimentConfig base_config(const RunSpec &spec, sim::ModelKind model, double phi1_deg,
                                  double phi2_deg) {
  require_monte_carlo_args(spec);
  sim::ExperimentConfig c;
  c.model = model;
  c.phi1 = deg_to_rad(phi1_deg);
  c.phi2 = deg_to_rad(phi2_deg);
  c.source = source_of(spec);
  c.trials = spec.trials;
  c.seed = spec.seed;
  c.partitions = resolve_partitions(spec);
  c.stream = 0;
  try {
    sim::validate(c);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  return c;
}

json config_json(const RunSpec &spec) {
  json c;
  c["command"] = command_name(spec.command);
  c["backend"] = spec.analytic ? "analytic" : "monte-carlo";
  if (spec.model) {
    c["model"] = std::string(sim::model_name(*spec.model));
  } else {
    c["model"] = (spec.command == Command::Scan) ? "all" : "phase";
  }
  c["phi1_deg"] = spec.phi1_deg;
  c["phi2_deg"] = spec.phi2_deg;
  c["phi1p_deg"] = spec.phi1p_deg;
  c["phi2p_deg"] = spec.phi2p_deg;
  c["delta_deg"] = spec.delta_deg;
  c["phi0_deg"] = spec.phi0_deg;
  c["trials"] = spec.trials;
  c["seed"] = spec.seed;
  c["partitions"] = resolve_partitions(spec);
  c["start_deg"] = spec.start_deg;
  c["stop_deg"] = spec.stop_deg;
  c["step_deg"] = spec.step_deg;
  c["format"] = spec.format == Format::Csv ? "csv" : "json";
  c["out"] = spec.out_path;
  return c;
}

Report begin(const RunSpec &spec) {
  Report r;
  r.config = config_json(spec);
  r.results = json::object();
  return r;
}

sim::ModelKind model_or_phase(const RunSpec &spec) {
  return spec.model.value_or(sim::ModelKind::PhaseModel);
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int model_id(sim::ModelKind kind) { return static_cast<int>(kind); }

}  // namespace

double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }

Report cmd_single(const RunSpec &spec) {
  Report r = begin(spec);
  const sim::ModelKind kind = model_or_phase(spec);
  const model::PairSourceSpec src = source_of(spec);
  const double phi1 = deg_to_rad(spec.phi1_deg);
  const double phi2 = deg_to_rad(spec.phi2_deg);
  const double e_exact = sim::analytic_correlation(kind, phi1, phi2, src);

  r.table.columns = {"phi1_deg", "phi2_deg", "delta_deg", "p_pp",    "p_mm",
                     "p_pm",     "p_mp",     "e",         "std_err", "n"};
  if (spec.analytic) {
    const model::OutcomeDistribution d = sim::channel_probabilities(kind, phi1, phi2, src);
    r.table.rows.push_back(
        {spec.phi1_deg, spec.phi2_deg, spec.delta_deg, d.pp, d.mm, d.pm, d.mp, e_exact, 0.0, 0.0});
    r.results = {{"p_pp", d.pp}, {"p_mm", d.mm}, {"p_pm", d.pm}, {"p_mp", d.mp}, {"e", e_exact}};
    return r;
  }

  const sim::ExperimentConfig config = base_config(spec, kind, spec.phi1_deg, spec.phi2_deg);
  const sim::CoincidenceCounts counts = sim::run_experiment(config);
  const sim::CorrelationEstimate est = sim::estimate_correlation(counts);
  const double n = static_cast<double>(counts.total);
  r.table.rows.push_back({spec.phi1_deg, spec.phi2_deg, spec.delta_deg, counts.n_pp / n,
                          counts.n_mm / n, counts.n_pm / n, counts.n_mp / n, est.e_hat,
                          est.std_err, n});
  r.results = {{"n_pp", counts.n_pp},  {"n_mm", counts.n_mm},       {"n_pm", counts.n_pm},
               {"n_mp", counts.n_mp},  {"total", counts.total},     {"e_hat", est.e_hat},
               {"std_err", est.std_err}, {"e_analytic", e_exact}};
  return r;
}

Report cmd_sweep(const RunSpec &spec) {
  if (!(spec.step_deg > 0.0) || !std::isfinite(spec.step_deg)) {
    throw UsageError("sweep: --step must be positive");
  }
  if (!(spec.stop_deg >= spec.start_deg)) throw UsageError("sweep: --stop must not be below --start");
  const double span = (spec.stop_deg - spec.start_deg) / spec.step_deg;
  if (span >= static_cast<double>(kMaxSweepRows)) throw UsageError("sweep: too many rows");
  const auto rows = static_cast<std::uint64_t>(std::floor(span + 1e-9)) + 1;

  Report r = begin(spec);
  const sim::ModelKind kind = model_or_phase(spec);
  const model::PairSourceSpec src = source_of(spec);
  const double phi1 = deg_to_rad(spec.phi1_deg);

  std::optional<sim::ExperimentConfig> mc;
  if (!spec.analytic) mc = base_config(spec, kind, spec.phi1_deg, spec.start_deg);

  r.table.columns = {"angle_deg", "e_analytic"};
  if (mc) {
    r.table.columns.push_back("e_hat");
    r.table.columns.push_back("std_err");
  }
  json points = json::array();
  for (std::uint64_t k = 0; k < rows; ++k) {
    const double angle = spec.start_deg + static_cast<double>(k) * spec.step_deg;
    const double e = sim::analytic_correlation(kind, phi1, deg_to_rad(angle), src);
    std::vector<double> row = {angle, e};
    json point = {{"angle_deg", angle}, {"e_analytic", e}};
    if (mc) {
      sim::ExperimentConfig c = *mc;
      c.phi2 = deg_to_rad(angle);
      c.stream = k + 1;
      const sim::CorrelationEstimate est = sim::estimate_correlation(sim::run_experiment(c));
      row.push_back(est.e_hat);
      row.push_back(est.std_err);
      point["e_hat"] = est.e_hat;
      point["std_err"] = est.std_err;
    }
    r.table.rows.push_back(std::move(row));
    points.push_back(std::move(point));
  }
  r.results["points"] = std::move(points);
  return r;
}

Report cmd_chsh(const RunSpec &spec) {
  Report r = begin(spec);
  const sim::ModelKind kind = model_or_phase(spec);
  const model::PairSourceSpec src = source_of(spec);
  const double a = deg_to_rad(spec.phi1_deg);
  const double ap = deg_to_rad(spec.phi1p_deg);
  const double b = deg_to_rad(spec.phi2_deg);
  const double bp = deg_to_rad(spec.phi2p_deg);

  std::array<double, 4> e{};
  std::array<double, 4> se{};
  double s = 0.0;
  double s_err = 0.0;
  if (spec.analytic) {
    if (kind == sim::ModelKind::PhaseModel && src.delta == 0.0) {
      e = {model::correlation(a, b), model::correlation(a, bp), model::correlation(ap, b),
           model::correlation(ap, bp)};
      s = model::chsh(a, ap, b, bp);
    } else {
      e = {sim::analytic_correlation(kind, a, b, src), sim::analytic_correlation(kind, a, bp, src),
           sim::analytic_correlation(kind, ap, b, src),
           sim::analytic_correlation(kind, ap, bp, src)};
      s = sim::analytic_chsh(kind, a, ap, b, bp, src);
    }
  } else {
    const sim::ExperimentConfig base = base_config(spec, kind, spec.phi1_deg, spec.phi2_deg);
    const sim::ChshEstimate est = sim::estimate_chsh(base, ap, bp);
    for (std::size_t k = 0; k < 4; ++k) {
      e[k] = est.terms[k].e_hat;
      se[k] = est.terms[k].std_err;
    }
    s = est.s_hat;
    s_err = est.std_err;
  }

  r.table.columns = {"phi1_deg",  "phi1p_deg",  "phi2_deg",  "phi2p_deg",   "e_ab",
                     "e_abp",     "e_apb",      "e_apbp",    "std_err_ab",  "std_err_abp",
                     "std_err_apb", "std_err_apbp", "s",     "std_err"};
  r.table.rows.push_back({spec.phi1_deg, spec.phi1p_deg, spec.phi2_deg, spec.phi2p_deg, e[0],
                          e[1], e[2], e[3], se[0], se[1], se[2], se[3], s, s_err});
  r.results = {{"e", e}, {"e_std_err", se}, {"s", s}, {"std_err", s_err}};
  return r;
}

ScanResult scan_grid(sim::ModelKind model, double step_deg,
                     const std::optional<sim::ExperimentConfig> &monte_carlo) {
  if (!(step_deg > 0.0) || !std::isfinite(step_deg)) throw UsageError("scan: --step must be positive");
  const double n_real = std::ceil(180.0 / step_deg - 1e-9);
  if (std::pow(n_real, 4) > kMaxScanQuadruples) {
    throw UsageError("scan: grid exceeds 1e8 angle quadruples");
  }
  const auto n = static_cast<std::size_t>(n_real);

  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = static_cast<double>(k) * step_deg;

  // Correlation and its standard error for every (side 1, side 2) grid pair.
  std::vector<double> e(n * n);
  std::vector<double> se(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = deg_to_rad(grid[i]);
      const double b = deg_to_rad(grid[j]);
      if (monte_carlo) {
        sim::ExperimentConfig c = *monte_carlo;
        c.model = model;
        c.phi1 = a;
        c.phi2 = b;
        c.stream = i * n + j + 1;
        const sim::CorrelationEstimate est = sim::estimate_correlation(sim::run_experiment(c));
        e[i * n + j] = est.e_hat;
        se[i * n + j] = est.std_err;
      } else {
        e[i * n + j] = sim::analytic_correlation(model, a, b);
      }
    }
  }

  ScanResult out;
  out.model = model;
  out.monte_carlo = monte_carlo.has_value();
  out.grid_points = n;
  out.max_classical_excess = -std::numeric_limits<double>::infinity();
  double best = -1.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t ap = 0; ap < n; ++ap) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t bp = 0; bp < n; ++bp) {
          const std::size_t ab = a * n + b, abp = a * n + bp, apb = ap * n + b, apbp = ap * n + bp;
          const double s = e[ab] - e[abp] + e[apb] + e[apbp];
          const double err =
              std::sqrt(se[ab] * se[ab] + se[abp] * se[abp] + se[apb] * se[apb] + se[apbp] * se[apbp]);
          out.max_classical_excess = std::max(out.max_classical_excess, std::abs(s) - (2.0 + 5.0 * err));
          // Near-ties keep the first quadruple in scan order.
          if (std::abs(s) > best + 1e-12) {
            best = std::abs(s);
            out.argmax_deg = {grid[a], grid[ap], grid[b], grid[bp]};
            out.s = s;
            out.std_err = err;
          }
        }
      }
    }
  }
  return out;
}

Report cmd_scan(const RunSpec &spec) {
  Report r = begin(spec);
  std::vector<sim::ModelKind> models;
  if (spec.model) {
    models.push_back(*spec.model);
  } else {
    models.assign(sim::kAllModels.begin(), sim::kAllModels.end());
  }

  std::optional<sim::ExperimentConfig> mc;
  if (!spec.analytic) mc = base_config(spec, models.front(), 0.0, 0.0);

  r.table.columns = {"model_id", "step_deg", "phi1_deg", "phi1p_deg", "phi2_deg",
                     "phi2p_deg", "s",       "std_err"};
  json per_model = json::array();
  for (sim::ModelKind kind : models) {
    const ScanResult res = scan_grid(kind, spec.step_deg, mc);
    r.table.rows.push_back({static_cast<double>(model_id(kind)), spec.step_deg, res.argmax_deg[0],
                            res.argmax_deg[1], res.argmax_deg[2], res.argmax_deg[3], res.s,
                            res.std_err});
    json m = {{"model", std::string(sim::model_name(kind))},
              {"model_id", model_id(kind)},
              {"grid_points", res.grid_points},
              {"argmax_deg", res.argmax_deg},
              {"s", res.s},
              {"max_abs_s", std::abs(res.s)},
              {"std_err", res.std_err}};
    if (res.monte_carlo) m["max_classical_excess"] = res.max_classical_excess;
    per_model.push_back(std::move(m));
  }
  r.results["models"] = std::move(per_model);
  return r;
}

Report cmd_verify(const RunSpec &spec) {
  Report r = begin(spec);
  const std::vector<checks::CheckResult> results = checks::run_invariant_suite(spec.seed);
  std::ostringstream csv;
  csv << "check,passed,max_error,tolerance,cases\n";
  for (const checks::CheckResult &c : results) {
    csv << c.name << ',' << (c.passed ? 1 : 0) << ',' << format_number(c.max_error) << ','
        << format_number(c.tolerance) << ',' << c.cases << '\n';
    r.checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"max_error", c.max_error},
                        {"tolerance", c.tolerance},
                        {"cases", c.cases}});
  }
  const bool ok = checks::all_passed(results);
  r.csv_override = csv.str();
  r.results = {{"passed", ok}, {"checks_run", results.size()}};
  r.exit_code = ok ? kExitOk : kExitCheckFailed;
  return r;
}

std::string render_csv(const Report &report) {
  if (!report.csv_override.empty()) return report.csv_override;
  std::string s;
  for (std::size_t i = 0; i < report.table.columns.size(); ++i) {
    if (i) s += ',';
    s += report.table.columns[i];
  }
  s += '\n';
  for (const auto &row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += format_number(row[i]);
    }
    s += '\n';
  }
  return s;
}

std::string render_json(const Report &report) {
  json doc = {{"config", report.config}, {"results", report.results}, {"checks", report.checks}};
  return doc.dump(2) + "\n";
}

namespace {

void add_common_options(CLI::App &sub, RunSpec &spec, std::string &model, std::string &format) {
  sub.add_option("--model", model, "Sampling model")
      ->check(CLI::IsMember({"phase", "bell-det", "bell-stoch"}));
  sub.add_flag("--analytic", spec.analytic, "Closed-form evaluation instead of Monte Carlo");
  sub.add_option("--delta", spec.delta_deg, "Source phase difference (degrees)")->capture_default_str();
  sub.add_option("--phi0", spec.phi0_deg, "Common initial phase (degrees)")->capture_default_str();
  sub.add_option("--trials", spec.trials, "Pairs per setting")->capture_default_str();
  sub.add_option("--seed", spec.seed, "64-bit seed")->capture_default_str();
  sub.add_option("--partitions", spec.partitions, "Parallel substreams (default: processors)");
  sub.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub.add_option("--out", spec.out_path, "Output file (default: standard output)");
}

void add_angle_options(CLI::App &sub, RunSpec &spec, bool primes) {
  sub.add_option("--phi1", spec.phi1_deg, "Side 1 setting (degrees)")->capture_default_str();
  sub.add_option("--phi2", spec.phi2_deg, "Side 2 setting (degrees)")->capture_default_str();
  if (primes) {
    sub.add_option("--phi1p", spec.phi1p_deg, "Alternate side 1 setting (degrees)")
        ->capture_default_str();
    sub.add_option("--phi2p", spec.phi2p_deg, "Alternate side 2 setting (degrees)")
        ->capture_default_str();
  }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Phase-rotation model of photon pair correlations"};
  app.require_subcommand(1);

  RunSpec single, sweep, chsh, scan, verify;
  single.command = Command::Single;
  sweep.command = Command::Sweep;
  chsh.command = Command::Chsh;
  chsh.phi1p_deg = 45.0;
  chsh.phi2_deg = 22.5;
  chsh.phi2p_deg = 67.5;
  scan.command = Command::Scan;
  scan.step_deg = 22.5;
  verify.command = Command::Verify;

  std::string model_s[5], format_s[5] = {"csv", "csv", "csv", "csv", "csv"};

  CLI::App *c_single = app.add_subcommand("single", "One setting: channel probabilities and E");
  add_common_options(*c_single, single, model_s[0], format_s[0]);
  add_angle_options(*c_single, single, false);

  CLI::App *c_sweep = app.add_subcommand("sweep", "E against the side 2 angle");
  add_common_options(*c_sweep, sweep, model_s[1], format_s[1]);
  add_angle_options(*c_sweep, sweep, false);
  c_sweep->add_option("--start", sweep.start_deg, "First side 2 angle (degrees)")->capture_default_str();
  c_sweep->add_option("--stop", sweep.stop_deg, "Last side 2 angle (degrees)")->capture_default_str();
  c_sweep->add_option("--step", sweep.step_deg, "Angle step (degrees)")->capture_default_str();

  CLI::App *c_chsh = app.add_subcommand("chsh", "CHSH sum at four settings");
  add_common_options(*c_chsh, chsh, model_s[2], format_s[2]);
  add_angle_options(*c_chsh, chsh, true);

  CLI::App *c_scan = app.add_subcommand("scan", "Maximise |S| over a grid of settings");
  add_common_options(*c_scan, scan, model_s[3], format_s[3]);
  c_scan->add_option("--step", scan.step_deg, "Grid step (degrees)")->capture_default_str();

  CLI::App *c_verify = app.add_subcommand("verify", "Run the built-in invariant suite");
  c_verify->add_option("--seed", verify.seed, "Seed for the random cases")->capture_default_str();
  c_verify->add_option("--format", format_s[4], "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  c_verify->add_option("--out", verify.out_path, "Output file (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::array<std::pair<CLI::App *, RunSpec *>, 5> subs = {
      {{c_single, &single}, {c_sweep, &sweep}, {c_chsh, &chsh}, {c_scan, &scan}, {c_verify, &verify}}};
  std::size_t which = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].first->parsed()) which = i;
  }
  RunSpec &spec = *subs[which].second;
  if (!model_s[which].empty()) spec.model = sim::parse_model(model_s[which]);
  spec.format = format_s[which] == "json" ? Format::Json : Format::Csv;

  Report report;
  try {
    switch (spec.command) {
      case Command::Single:
        report = cmd_single(spec);
        break;
      case Command::Sweep:
        report = cmd_sweep(spec);
        break;
      case Command::Chsh:
        report = cmd_chsh(spec);
        break;
      case Command::Scan:
        report = cmd_scan(spec);
        break;
      case Command::Verify:
        report = cmd_verify(spec);
        break;
    }
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  const std::string text = spec.format == Format::Json ? render_json(report) : render_csv(report);
  if (spec.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(spec.out_path, std::ios::binary);
    if (!(f << text)) {
      err << "error: cannot write " << spec.out_path << "\n";
      return kExitCheckFailed;
    }
  }

  for (const auto &c : report.checks) {
    if (!c.value("passed", true)) {
      err << "FAILED " << c.value("name", std::string("?")) << "\n";
    }
  }
  return report.exit_code;
}

}  // namespace bellphase::cli
