#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlbm/mlbm.hpp"

namespace mlbm::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Thrown for bad flag values found after parsing; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

inline DomainSpec to_spec(const std::vector<int>& dims) {
  if (dims.size() != 3) throw UsageError("--dims takes exactly three extents LX,LY,LZ");
  return {dims[0], dims[1], dims[2]};
}

inline SolverKind to_kind(const std::string& text) {
  if (auto kind = parse_solver_kind(text)) return *kind;
  std::string known;
  for (SolverKind k : kAllSolvers) known += (known.empty() ? "" : ", ") + std::string(name(k));
  throw UsageError("unknown solver '" + text + "' (expected one of: " + known + ")");
}

// Parameter problems are usage errors, so validation is rethrown as such.
inline void check(SolverKind kind, const DomainSpec& spec, const RunParams& params) {
  try {
    validate(kind, spec, params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(name(kind)) + ": " + e.what());
  }
}

struct RunFlags {
  std::string solver;
  std::vector<int> dims;
  int steps = 0;
  double omega = 1.0;
  double u_lid = 0.05;
  int tile = 16;
  int workers = 1;
  std::string dump, norms, csv;
};

struct VerifyFlags {
  std::vector<int> dims;
  int steps = 0;
  double tol = 1e-12;
  double omega = 1.0;
  double u_lid = 0.05;
  int tile = 16;
  int workers = 1;
};

struct BenchFlags {
  std::vector<int> dims;
  int steps = 0;
  std::vector<std::string> solvers{"fuse", "fuse-prism", "two-step", "two-step-prism"};
  std::vector<int> tiles{16};
  std::vector<int> workers{1};
  int repeat = 5;
  double omega = 1.0;
  double u_lid = 0.05;
  std::string csv;
};

inline int cmd_run(const RunFlags& f, std::ostream& out) {
  CavityConfig config;
  config.spec = to_spec(f.dims);
  config.omega = f.omega;
  config.v = f.u_lid;
  config.steps = f.steps;
  config.tile = f.tile;
  config.workers = f.workers;
  config.solver = to_kind(f.solver);
  config.dump_path = f.dump;
  config.norm_path = f.norms;
  if (config.v < 0.0) throw UsageError("--u-lid must be non-negative");
  check(config.solver, config.spec, config.run_params());

  DistributionField field = build_cavity(config.spec);
  const RunReport report = run(config.solver, field, config.run_params());
  out << fmt("solver %s dims %d,%d,%d steps %d tile %d workers %d\n", std::string(name(report.kind)).c_str(),
             config.spec.lx, config.spec.ly, config.spec.lz, report.steps,
             effective_tile(config.solver, config.spec, config.tile), config.workers);
  out << fmt("seconds %.6f\nMFLUPS %.3f\nmass drift %.3e\n", report.seconds, report.mflups,
             report.relative_mass_drift());

  if (!config.dump_path.empty()) write_field_dump(field, config.dump_path);
  if (!config.norm_path.empty()) write_norm_log(field, config.norm_path);
  if (!f.csv.empty()) {
    BenchCsv csv(f.csv);
    csv.append({std::string(name(report.kind)), config.spec, config.tile, config.workers, report.steps,
                report.seconds, report.mflups, "0"});
  }
  return kOk;
}

inline int cmd_verify(const VerifyFlags& f, std::ostream& out) {
  const DomainSpec spec = to_spec(f.dims);
  if (f.tol < 0.0) throw UsageError("--tol must be non-negative");
  if (f.u_lid < 0.0) throw UsageError("--u-lid must be non-negative");
  const RunParams params{f.steps, f.tile, f.workers, {f.omega, {0.0, 0.0, f.u_lid}, 1.0}};
  for (SolverKind kind : kAllSolvers) check(kind, spec, params);

  DistributionField reference = build_cavity(spec);
  run(SolverKind::oracle, reference, params);
  const std::vector<double> expected = velocity_norm_field(reference);

  out << fmt("%-20s %-14s %-14s %s\n", "solver", "max_abs_dev", "worst_cell", "status");
  bool all_ok = true;
  for (SolverKind kind : kAllSolvers) {
    if (kind == SolverKind::oracle) continue;
    DistributionField field = build_cavity(spec);
    run(kind, field, params);
    const std::vector<double> got = velocity_norm_field(field);
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t k = 0; k < got.size(); ++k) {
      const double d = std::abs(got[k] - expected[k]);
      if (!(d <= worst)) {  // also catches NaN
        worst = d;
        at = k;
      }
    }
    const bool ok = worst <= f.tol;
    all_ok = all_ok && ok;
    const CellCoord c = cell_coord(spec, at);
    out << fmt("%-20s %-14.3e %-14s %s\n", std::string(name(kind)).c_str(), worst,
               fmt("(%d,%d,%d)", c.x, c.y, c.z).c_str(), ok ? "ok" : "FAIL");
  }
  out << (all_ok ? "all solvers match the oracle" : "deviation exceeds tolerance") << fmt(" (tol %.3e)\n", f.tol);
  return all_ok ? kOk : kFailure;
}

inline int cmd_bench(const BenchFlags& f, std::ostream& out) {
  const DomainSpec spec = to_spec(f.dims);
  if (f.repeat < 1) throw UsageError("--repeat must be >= 1");
  if (f.tiles.empty() || f.workers.empty() || f.solvers.empty())
    throw UsageError("--solvers, --tiles and --workers need at least one value");
  if (f.u_lid < 0.0) throw UsageError("--u-lid must be non-negative");
  const KernelParams kernel{f.omega, {0.0, 0.0, f.u_lid}, 1.0};

  struct Config {
    SolverKind kind;
    int tile, workers;
  };
  std::vector<Config> configs;
  for (const std::string& s : f.solvers) {
    const SolverKind kind = to_kind(s);
    const std::vector<int> ws = kind == SolverKind::two_step_prism_par ? f.workers : std::vector<int>{1};
    for (int w : ws)
      for (int t : f.tiles) {
        check(kind, spec, {f.steps, t, w, kernel});
        configs.push_back({kind, t, w});
      }
  }

  std::unique_ptr<BenchCsv> csv;
  if (!f.csv.empty()) csv = std::make_unique<BenchCsv>(f.csv);

  // best mean per (solver, workers)
  std::map<std::pair<std::string, int>, std::pair<int, double>> best;
  DistributionField field(spec);
  for (const Config& c : configs) {
    const std::string solver(name(c.kind));
    double sum_s = 0.0, sum_m = 0.0;
    for (int r = 0; r < f.repeat; ++r) {
      fill_uniform(field, equilibrium(1.0, {0.0, 0.0, 0.0}));
      const RunReport rep = run(c.kind, field, {f.steps, c.tile, c.workers, kernel});
      sum_s += rep.seconds;
      sum_m += rep.mflups;
      const BenchRecord record{solver, spec, c.tile, c.workers, f.steps, rep.seconds, rep.mflups, std::to_string(r)};
      if (csv) csv->append(record);
      out << record.csv_row() << '\n';
    }
    const BenchRecord mean{solver, spec, c.tile, c.workers, f.steps, sum_s / f.repeat, sum_m / f.repeat, "mean"};
    if (csv) csv->append(mean);
    out << mean.csv_row() << '\n';
    auto [it, fresh] = best.try_emplace({solver, c.workers}, c.tile, mean.mflups);
    if (!fresh && mean.mflups > it->second.second) it->second = {c.tile, mean.mflups};
  }
  out << "best tile per solver:\n";
  for (const auto& [key, value] : best)
    out << fmt("  %-20s workers %-3d tile %-5d MFLUPS %.3f\n", key.first.c_str(), key.second, value.first,
               value.second);
  return kOk;
}

}  // namespace detail

/// Parses and executes one command line. Returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-copy D3Q19 lattice Boltzmann cavity solvers"};
  app.require_subcommand(1);

  detail::RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "run one solver on a lid-driven cavity");
  run_cmd->add_option("--solver", rf.solver, "solver kind")->required();
  run_cmd->add_option("--dims", rf.dims, "LX,LY,LZ")->required()->delimiter(',')->expected(3);
  run_cmd->add_option("--steps", rf.steps, "time steps")->required()->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--omega", rf.omega, "BGK relaxation frequency")->capture_default_str();
  run_cmd->add_option("--u-lid", rf.u_lid, "lid speed along +Z")->capture_default_str();
  run_cmd->add_option("--tile", rf.tile, "prism tile")->capture_default_str();
  run_cmd->add_option("--workers", rf.workers, "threads for the parallel solver")->capture_default_str();
  run_cmd->add_option("--dump", rf.dump, "binary field dump");
  run_cmd->add_option("--norms", rf.norms, "velocity norm log");
  run_cmd->add_option("--csv", rf.csv, "append a throughput record");

  detail::VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "compare every solver against the two-copy oracle");
  verify_cmd->add_option("--dims", vf.dims, "LX,LY,LZ")->required()->delimiter(',')->expected(3);
  verify_cmd->add_option("--steps", vf.steps, "time steps (even)")->required()->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--tol", vf.tol, "max abs velocity norm deviation")->capture_default_str();
  verify_cmd->add_option("--omega", vf.omega)->capture_default_str();
  verify_cmd->add_option("--u-lid", vf.u_lid)->capture_default_str();
  verify_cmd->add_option("--tile", vf.tile)->capture_default_str();
  verify_cmd->add_option("--workers", vf.workers)->capture_default_str();

  detail::BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "throughput sweep over solvers, tiles and workers");
  bench_cmd->add_option("--dims", bf.dims, "LX,LY,LZ")->required()->delimiter(',')->expected(3);
  bench_cmd->add_option("--steps", bf.steps)->required()->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--solvers", bf.solvers)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--tiles", bf.tiles)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--workers", bf.workers)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--repeat", bf.repeat)->capture_default_str();
  bench_cmd->add_option("--omega", bf.omega)->capture_default_str();
  bench_cmd->add_option("--u-lid", bf.u_lid)->capture_default_str();
  bench_cmd->add_option("--csv", bf.csv, "append records here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return detail::cmd_run(rf, out);
    if (*verify_cmd) return detail::cmd_verify(vf, out);
    return detail::cmd_bench(bf, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace mlbm::cli
