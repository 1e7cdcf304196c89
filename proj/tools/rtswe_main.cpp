// rtswe: full-order runs, offline reduction, reduced runs and comparison
// for the double-vortex benchmark.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rtswe/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rtswe;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4, kFormat = 5 };

struct Options {
  std::string config;
  std::string out = "out";
  std::string method;
  // Overrides kept as strings and routed through apply_setting so the
  // file and the command line share one validation path.
  std::vector<std::pair<std::string, CLI::Option*>> overrides;
  std::map<std::string, std::string> values;
};

RunSettings settings_from(const Options& o) {
  RunSettings s;
  if (!o.config.empty()) s = load_settings(o.config, s);
  for (const auto& [key, opt] : o.overrides) {
    if (opt->count() > 0) apply_setting(s, key, o.values.at(key));
  }
  s.validate();
  return s;
}

void merge_report(const fs::path& dir, const io::Report& update) {
  io::Report report = io::read_report_or_empty(dir / "report.json");
  for (const auto& [k, v] : update) report[k] = v;
  if (report.count("time_fom")) {
    for (const char* m : {"pod", "deim"}) {
      const std::string key = std::string("time_online_") + m;
      if (report.count(key) && report[key] > 0.0) {
        report[std::string("speedup_") + m] = report["time_fom"] / report[key];
      }
    }
  }
  io::write_report(dir / "report.json", report);
}

void add_invariant_errors(io::Report& r, const std::string& label, const InvariantErrors& e) {
  for (int i = 0; i < 4; ++i) {
    r["inv_" + label + "_" + kInvariantNames[i]] = e.mean[i];
    r["invmax_" + label + "_" + kInvariantNames[i]] = e.max[i];
  }
}

void add_state_errors(io::Report& r, const std::string& label, const std::array<double, 4>& e) {
  for (int w = 0; w < 4; ++w) r["error_" + label + "_" + std::string(name(static_cast<Var>(w)))] = e[w];
}

/// Snapshot header values take precedence over the configured grid and steps.
RunSettings adopt_header(RunSettings s, const io::SnapshotHeader& h) {
  s.bench.n = static_cast<int>(h.n);
  s.bench.K = static_cast<int>(h.K);
  s.bench.dt = h.dt;
  s.validate();
  return s;
}

void require_match(bool ok, const std::string& what) {
  if (!ok) throw FormatError("header mismatch: " + what);
}

void print_tables(const io::Report& r) {
  auto get = [&](const std::string& k) {
    auto it = r.find(k);
    return it == r.end() ? std::nan("") : it->second;
  };
  std::printf("\nTime-averaged relative L2 errors\n");
  std::printf("%-10s %12s %12s %12s %12s\n", "", "h", "u", "v", "s");
  for (const char* m : {"pod", "deim"}) {
    std::printf("%-10s", m[0] == 'p' ? "POD" : "POD-DEIM");
    for (const char* w : {"h", "u", "v", "s"}) {
      std::printf(" %12.3e", get(std::string("error_") + m + "_" + w));
    }
    std::printf("\n");
  }
  std::printf("\nMean relative errors of the conserved quantities\n");
  std::printf("%-10s %12s %12s %12s %12s\n", "", "H", "Q", "M", "B");
  for (const char* m : {"fom", "pod", "deim"}) {
    const char* label = m[0] == 'f' ? "FOM" : (m[0] == 'p' ? "POD" : "POD-DEIM");
    std::printf("%-10s", label);
    for (const char* e : {"H", "Q", "M", "B"}) {
      std::printf(" %12.3e", get(std::string("inv_") + m + "_" + e));
    }
    std::printf("\n");
  }
  std::printf("\nWall clock time [s] and speedup\n");
  std::printf("%-10s %-10s %10.1f\n", "FOM", "", get("time_fom"));
  std::printf("%-10s %-10s %10.1f\n", "POD", "offline", get("time_offline_pod"));
  std::printf("%-10s %-10s %10.1f %10.1f\n", "", "online", get("time_online_pod"),
              get("speedup_pod"));
  std::printf("%-10s %-10s %10.1f\n", "POD-DEIM", "offline", get("time_offline_deim"));
  std::printf("%-10s %-10s %10.1f %10.1f\n", "", "online", get("time_online_deim"),
              get("speedup_deim"));
}

int cmd_fom(const Options& o) {
  const RunSettings s = settings_from(o);
  const fs::path dir = o.out;
  io::ensure_directory(dir);
  FomStage fom = run_fom_stage(s);
  io::write_snapshots(dir / "snapshots.bin", fom.traj.states, s.bench.n, s.bench.dt);
  io::write_invariants_csv(dir / "fom_invariants.csv", fom.traj.invariants, s.bench.dt);
  write_field_dumps(dir, "fom", fom.model, fom.traj.states, {0, s.bench.K});

  const InvariantErrors inv = invariant_error_series(fom.traj.invariants);
  io::Report r{{"n", s.bench.n}, {"N", static_cast<double>(fom.model.N())},
               {"K", s.bench.K}, {"dt", s.bench.dt}, {"time_fom", fom.seconds}};
  add_invariant_errors(r, "fom", inv);
  merge_report(dir, r);
  std::printf("fom: n=%d N=%lld K=%d dt=%g wall=%.2f s\n", s.bench.n,
              static_cast<long long>(fom.model.N()), s.bench.K, s.bench.dt, fom.seconds);
  std::printf("fom: mean relative invariant errors H=%.3e M=%.3e Q=%.3e B=%.3e\n", inv.mean[0],
              inv.mean[1], inv.mean[2], inv.mean[3]);
  return kOk;
}

int cmd_reduce(const Options& o) {
  RunSettings s = settings_from(o);
  const fs::path dir = o.out;
  const io::SnapshotFile snap = io::read_snapshots(dir / "snapshots.bin");
  s = adopt_header(s, snap.header);
  const Model model = benchmark_model(s.bench);
  ReduceStage red = run_reduce_stage(s, model, snap.states);

  io::write_basis(dir / "basis.bin", red.basis, s.bench.n);
  io::write_deim(dir / "deim.bin", red.deim);
  io::write_rom_matrices(dir / "romops.bin", red.matrices);
  std::vector<std::string> names;
  std::vector<Vector> spectra;
  for (Var w : kAllVars) {
    names.emplace_back(name(w));
    spectra.push_back(red.basis.sigma[idx(w)]);
  }
  io::write_spectra_csv(dir / "pod_spectra.csv", names, spectra);
  names.clear();
  spectra.clear();
  for (int j = 0; j < kNumNonlinear; ++j) {
    names.push_back("F" + std::to_string(j + 1));
    spectra.push_back(red.deim.op[j].sigma);
  }
  io::write_spectra_csv(dir / "deim_spectra.csv", names, spectra);

  double cond = 0.0;
  for (int j = 0; j < kNumNonlinear; ++j) {
    cond = std::max(cond, red.deim.op[j].condition);
    if (red.deim.op[j].condition > kDeimConditionWarning) {
      std::fprintf(stderr, "warning: cond(P^T Phi) for F%d is %.3e\n", j + 1,
                   red.deim.op[j].condition);
    }
  }
  io::Report r{{"r", red.basis.r},
               {"p", red.deim.p},
               {"deim_max_condition", cond},
               {"time_offline_pod", red.time_pod},
               {"time_offline_deim", red.time_deim}};
  for (Var w : kAllVars) {
    r["pod_criterion_rank_" + std::string(name(w))] = red.basis.criterion_rank[idx(w)];
  }
  for (int j = 0; j < kNumNonlinear; ++j) {
    r["deim_criterion_rank_F" + std::to_string(j + 1)] = red.deim.criterion_rank[j];
  }
  merge_report(dir, r);

  std::printf("r=%d p=%d\n", red.basis.r, red.deim.p);
  std::printf("reduce: POD criterion ranks h=%d u=%d v=%d s=%d\n", red.basis.criterion_rank[0],
              red.basis.criterion_rank[1], red.basis.criterion_rank[2],
              red.basis.criterion_rank[3]);
  std::printf("reduce: DEIM criterion ranks");
  for (int j = 0; j < kNumNonlinear; ++j) std::printf(" F%d=%d", j + 1, red.deim.criterion_rank[j]);
  std::printf("\nreduce: max cond(P^T Phi)=%.3e offline POD=%.2f s POD-DEIM=%.2f s\n", cond,
              red.time_pod, red.time_deim);
  return kOk;
}

struct LoadedBasis {
  RunSettings settings;
  io::SnapshotFile snap;
  PodBasis basis;
  Model model;
};

LoadedBasis load_basis_inputs(const Options& o) {
  LoadedBasis in;
  const fs::path dir = o.out;
  in.snap = io::read_snapshots(dir / "snapshots.bin");
  in.settings = adopt_header(settings_from(o), in.snap.header);
  io::BasisFile bf = io::read_basis(dir / "basis.bin");
  require_match(bf.n == in.snap.header.n && static_cast<std::uint64_t>(bf.basis.N()) == in.snap.header.N,
                "basis.bin grid differs from snapshots.bin");
  in.basis = std::move(bf.basis);
  in.model = benchmark_model(in.settings.bench);
  return in;
}

int cmd_rom(const Options& o) {
  RomMethod method;
  if (o.method == "pod") {
    method = RomMethod::pod;
  } else if (o.method == "pod-deim") {
    method = RomMethod::pod_deim;
  } else {
    throw ConfigError("--method must be pod or pod-deim");
  }
  const fs::path dir = o.out;
  LoadedBasis in = load_basis_inputs(o);
  const RunSettings& s = in.settings;

  std::optional<RomOperators> ops;
  if (method == RomMethod::pod_deim) {
    DeimSet deim = io::read_deim(dir / "deim.bin");
    require_match(deim.op[0].phi.rows() == in.basis.N(), "deim.bin grid differs from basis.bin");
    RomMatrices m = io::read_rom_matrices(dir / "romops.bin");
    require_match(m.r == in.basis.r, "romops.bin rank differs from basis.bin");
    require_match(m.p == deim.p, "romops.bin DEIM mode count differs from deim.bin");
    ops = make_rom_operators(std::move(m), in.basis, std::move(deim), in.model);
  }

  const Vector z0 = in.snap.states.col(0);
  RomStage rom = run_rom_stage(method, s, in.model, in.basis, ops ? &*ops : nullptr, z0);
  const std::string label = method_label(method);
  io::write_trajectory_csv(dir / ("rom_trajectory_" + label + ".csv"), rom.traj.coeffs, s.bench.dt);
  io::write_invariants_csv(dir / ("rom_invariants_" + label + ".csv"), rom.traj.invariants,
                           s.bench.dt);
  write_field_dumps(dir, label, in.model, rom.lifted, {0, s.bench.K});

  const auto l2 = relative_L2_error(in.snap.states, rom.lifted, in.model.grid);
  const InvariantErrors inv = invariant_error_series(rom.traj.invariants);
  io::Report r{{"time_online_" + label, rom.seconds}};
  add_state_errors(r, label, l2);
  add_invariant_errors(r, label, inv);
  merge_report(dir, r);

  std::printf("rom %s: r=%d wall=%.3f s\n", o.method.c_str(), in.basis.r, rom.seconds);
  std::printf("rom %s: relative L2 errors h=%.3e u=%.3e v=%.3e s=%.3e\n", o.method.c_str(), l2[0],
              l2[1], l2[2], l2[3]);
  std::printf("rom %s: mean relative invariant errors H=%.3e M=%.3e Q=%.3e B=%.3e\n",
              o.method.c_str(), inv.mean[0], inv.mean[1], inv.mean[2], inv.mean[3]);
  return kOk;
}

int cmd_compare(const Options& o) {
  const fs::path dir = o.out;
  LoadedBasis in = load_basis_inputs(o);
  const int K = in.settings.bench.K;

  std::vector<InvariantValues> fom_inv;
  for (Index k = 0; k < in.snap.states.cols(); ++k) {
    fom_inv.push_back(invariants(in.snap.states.col(k), in.model.physics, in.model.grid, in.model.ops));
  }
  io::Report r;
  std::vector<io::ErrorRow> rows;
  const InvariantErrors fom_err = invariant_error_series(fom_inv);
  add_invariant_errors(r, "fom", fom_err);
  rows.push_back({"fom", {}, fom_err.mean});

  int found = 0;
  for (RomMethod method : {RomMethod::pod, RomMethod::pod_deim}) {
    const std::string label = method_label(method);
    const fs::path path = dir / ("rom_trajectory_" + label + ".csv");
    if (!fs::exists(path)) continue;
    ++found;
    const Matrix coeffs = io::read_trajectory_csv(path);
    require_match(coeffs.rows() == 4 * in.basis.r, path.filename().string() + " rank differs from basis.bin");
    require_match(coeffs.cols() == K + 1, path.filename().string() + " step count differs from snapshots.bin");
    const Matrix lifted = lift_trajectory(in.basis, coeffs);
    std::vector<InvariantValues> inv;
    for (Index k = 0; k < lifted.cols(); ++k) {
      inv.push_back(invariants(lifted.col(k), in.model.physics, in.model.grid, in.model.ops));
    }
    const auto l2 = relative_L2_error(in.snap.states, lifted, in.model.grid);
    const InvariantErrors err = invariant_error_series(inv);
    add_state_errors(r, label, l2);
    add_invariant_errors(r, label, err);
    rows.push_back({method == RomMethod::pod ? "pod" : "pod-deim", l2, err.mean});
  }
  if (found == 0) throw IoError("no reduced trajectories found in " + dir.string());
  io::write_errors_csv(dir / "errors.csv", rows);
  merge_report(dir, r);
  print_tables(io::read_report(dir / "report.json"));
  return kOk;
}

int cmd_run(const Options& o) {
  const RunSettings s = settings_from(o);
  const fs::path dir = o.out;
  const RunReport report = run_pipeline(s, dir);
  std::printf("r=%d p=%d\n", report.r, report.p);
  print_tables(to_report(report));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating thermal shallow water: full-order and reduced-order models"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "flat key = value settings file");
  app.add_option("--out", o.out, "artifact directory")->capture_default_str();
  const std::vector<std::pair<std::string, std::string>> flags{
      {"--n", "n"},
      {"--K", "K"},
      {"--dt", "dt"},
      {"--kappa-pod", "kappa_pod"},
      {"--kappa-deim", "kappa_deim"},
      {"--r", "r"},
      {"--p", "p"},
      {"--newton-tol", "newton_tol"},
      {"--newton-max-iter", "newton_max_iter"},
      {"--rom-newton-tol", "rom_newton_tol"},
      {"--rom-newton-max-iter", "rom_newton_max_iter"},
      {"--threads", "threads"}};
  for (const auto& [flag, key] : flags) {
    o.overrides.emplace_back(key, app.add_option(flag, o.values[key], "override " + key));
  }

  auto* fom = app.add_subcommand("fom", "integrate the full-order model, write snapshots");
  auto* reduce = app.add_subcommand("reduce", "POD, DEIM and tensor precompute from snapshots");
  auto* rom = app.add_subcommand("rom", "integrate a reduced model");
  rom->add_option("--method", o.method, "pod or pod-deim")->required();
  auto* compare = app.add_subcommand("compare", "errors against the full-order run and summary tables");
  auto* run = app.add_subcommand("run", "full pipeline in one process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*fom) return cmd_fom(o);
    if (*reduce) return cmd_reduce(o);
    if (*rom) return cmd_rom(o);
    if (*compare) return cmd_compare(o);
    if (*run) return cmd_run(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kFormat;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
