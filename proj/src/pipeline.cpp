#include "rtswe/pipeline.hpp"

#include <cstdio>

namespace rtswe {

namespace {

/// Run f, prefixing any library error with the stage name while keeping its type.
template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  const std::string tag = std::string(stage) + ": ";
  try {
    return f();
  } catch (const NewtonError& e) {
    throw NewtonError(tag + e.what(), e.residual(), e.iterations());
  } catch (const NumericError& e) {
    throw NumericError(tag + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const FormatError& e) {
    throw FormatError(tag + e.what());
  }
}

std::vector<InvariantValues> column_invariants(const Matrix& states, const Model& model) {
  std::vector<InvariantValues> out;
  out.reserve(states.cols());
  for (Index k = 0; k < states.cols(); ++k) {
    out.push_back(invariants(states.col(k), model.physics, model.grid, model.ops));
  }
  return out;
}

}  // namespace

std::string method_label(RomMethod method) {
  return method == RomMethod::pod ? "pod" : "deim";
}

FomStage run_fom_stage(const RunSettings& settings) {
  return staged("fom", [&] {
    settings.validate();
    FomStage out;
    out.model = benchmark_model(settings.bench);
    out.initial = double_vortex_initial(settings.bench, out.model.grid);
    Stopwatch clock;
    out.traj = integrate_fom(out.initial, settings.bench.dt, settings.bench.K, out.model,
                             settings.fom_newton);
    out.seconds = clock.seconds();
    return out;
  });
}

ReduceStage run_reduce_stage(const RunSettings& settings, const Model& model,
                             const Matrix& states) {
  ReduceStage out;
  const DoubleVortexConfig& c = settings.bench;
  Stopwatch clock;
  staged("pod", [&] {
    const SnapshotSet snapshots = collect_snapshots(states);
    out.basis = build_pod_basis(snapshots, c.kappa_pod, c.r_override, settings.threads);
  });
  out.time_pod = clock.seconds();
  staged("deim", [&] {
    const NonlinSnapshots nonlin =
        collect_nonlin_snapshots(states, out.basis, model.physics, model.ops);
    out.deim = build_deim(nonlin, c.kappa_deim, c.p_override, settings.threads);
  });
  staged("precompute", [&] {
    out.matrices =
        precompute_rom_matrices(out.basis, out.deim, model.ops, settings.threads, &out.stats);
  });
  out.time_deim = clock.seconds();
  return out;
}

RomStage run_rom_stage(RomMethod method, const RunSettings& settings, const Model& model,
                       const PodBasis& basis, const RomOperators* ops, const Vector& z0) {
  return staged(method == RomMethod::pod ? "rom-pod" : "rom-deim", [&] {
    if (method == RomMethod::pod_deim && ops == nullptr) {
      throw ConfigError("POD-DEIM integration needs the reduced operators");
    }
    const DoubleVortexConfig& c = settings.bench;
    RomStage out;
    const RomState initial{restrict_state(basis, z0), 0.0};
    Stopwatch clock;
    if (method == RomMethod::pod) {
      out.traj = integrate_pod_rom(initial, c.dt, c.K, basis, model, settings.rom_newton, false);
    } else {
      out.traj = integrate_rom(initial, c.dt, c.K, *ops, settings.rom_newton, false, &out.counters);
    }
    out.lifted = lift_trajectory(basis, out.traj.coeffs);
    out.seconds = clock.seconds();
    out.traj.invariants = column_invariants(out.lifted, model);
    return out;
  });
}

io::Report to_report(const RunReport& r) {
  io::Report out;
  out["n"] = r.n;
  out["N"] = static_cast<double>(r.N);
  out["K"] = r.K;
  out["dt"] = r.dt;
  out["r"] = r.r;
  out["p"] = r.p;
  out["deim_max_condition"] = r.deim_max_condition;
  for (int w = 0; w < 4; ++w) {
    const std::string var(name(static_cast<Var>(w)));
    out["error_pod_" + var] = r.l2_pod[w];
    out["error_deim_" + var] = r.l2_deim[w];
    out["pod_criterion_rank_" + var] = r.pod_criterion_rank[w];
  }
  for (int j = 0; j < kNumNonlinear; ++j) {
    out["deim_criterion_rank_F" + std::to_string(j + 1)] = r.deim_criterion_rank[j];
  }
  for (int e = 0; e < 4; ++e) {
    const std::string inv = kInvariantNames[e];
    out["inv_fom_" + inv] = r.inv_fom.mean[e];
    out["inv_pod_" + inv] = r.inv_pod.mean[e];
    out["inv_deim_" + inv] = r.inv_deim.mean[e];
    out["invmax_fom_" + inv] = r.inv_fom.max[e];
    out["invmax_pod_" + inv] = r.inv_pod.max[e];
    out["invmax_deim_" + inv] = r.inv_deim.max[e];
  }
  out["time_fom"] = r.time_fom;
  out["time_offline_pod"] = r.time_offline_pod;
  out["time_offline_deim"] = r.time_offline_deim;
  out["time_online_pod"] = r.time_online_pod;
  out["time_online_deim"] = r.time_online_deim;
  out["speedup_pod"] = r.speedup_pod();
  out["speedup_deim"] = r.speedup_deim();
  return out;
}

void write_field_dumps(const std::filesystem::path& dir, const std::string& label,
                       const Model& model, const Matrix& states,
                       const std::vector<Index>& steps) {
  const std::filesystem::path fields = dir / "fields";
  io::ensure_directory(fields);
  const Index N = model.N();
  for (Index k : steps) {
    if (k < 0 || k >= states.cols()) throw ConfigError("field dump step out of range");
    const Vector z = states.col(k);
    for (Var w : kAllVars) {
      io::write_field_csv(fields / (label + "_" + std::string(name(w)) + "_" + std::to_string(k) + ".csv"),
                          z.segment(idx(w) * N, N), model.grid.n);
    }
    io::write_field_csv(fields / (label + "_q_" + std::to_string(k) + ".csv"),
                        potential_vorticity(z, model.physics, model.ops), model.grid.n);
  }
}

RunReport run_pipeline(const RunSettings& settings,
                       const std::optional<std::filesystem::path>& out) {
  settings.validate();
  if (out) io::ensure_directory(*out);
  const DoubleVortexConfig& c = settings.bench;

  RunReport report;
  report.n = c.n;
  report.K = c.K;
  report.dt = c.dt;

  FomStage fom = run_fom_stage(settings);
  const Model& model = fom.model;
  report.N = model.N();
  report.time_fom = fom.seconds;
  report.inv_fom = invariant_error_series(fom.traj.invariants);

  ReduceStage red = run_reduce_stage(settings, model, fom.traj.states);
  report.r = red.basis.r;
  report.p = red.deim.p;
  report.pod_criterion_rank = red.basis.criterion_rank;
  report.deim_criterion_rank = red.deim.criterion_rank;
  for (const auto& op : red.deim.op) {
    report.deim_max_condition = std::max(report.deim_max_condition, op.condition);
  }
  report.time_offline_pod = red.time_pod;
  report.time_offline_deim = red.time_deim;

  const RomOperators ops = make_rom_operators(red.matrices, red.basis, red.deim, model);
  const Vector& z0 = fom.initial.z;
  RomStage pod = run_rom_stage(RomMethod::pod, settings, model, red.basis, nullptr, z0);
  RomStage deim = run_rom_stage(RomMethod::pod_deim, settings, model, red.basis, &ops, z0);

  report.time_online_pod = pod.seconds;
  report.time_online_deim = deim.seconds;
  report.l2_pod = relative_L2_error(fom.traj.states, pod.lifted, model.grid);
  report.l2_deim = relative_L2_error(fom.traj.states, deim.lifted, model.grid);
  report.inv_pod = invariant_error_series(pod.traj.invariants);
  report.inv_deim = invariant_error_series(deim.traj.invariants);

  if (out) {
    staged("write", [&] {
      const auto& dir = *out;
      io::write_snapshots(dir / "snapshots.bin", fom.traj.states, c.n, c.dt);
      io::write_basis(dir / "basis.bin", red.basis, c.n);
      io::write_deim(dir / "deim.bin", red.deim);
      io::write_rom_matrices(dir / "romops.bin", red.matrices);
      io::write_invariants_csv(dir / "fom_invariants.csv", fom.traj.invariants, c.dt);
      io::write_invariants_csv(dir / "rom_invariants_pod.csv", pod.traj.invariants, c.dt);
      io::write_invariants_csv(dir / "rom_invariants_deim.csv", deim.traj.invariants, c.dt);
      io::write_trajectory_csv(dir / "rom_trajectory_pod.csv", pod.traj.coeffs, c.dt);
      io::write_trajectory_csv(dir / "rom_trajectory_deim.csv", deim.traj.coeffs, c.dt);
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
      io::write_errors_csv(dir / "errors.csv",
                           {{"fom", {}, report.inv_fom.mean},
                            {"pod", report.l2_pod, report.inv_pod.mean},
                            {"pod-deim", report.l2_deim, report.inv_deim.mean}});
      const std::vector<Index> steps{0, c.K};
      write_field_dumps(dir, "fom", model, fom.traj.states, steps);
      write_field_dumps(dir, "pod", model, pod.lifted, steps);
      write_field_dumps(dir, "deim", model, deim.lifted, steps);
      io::write_report(dir / "report.json", to_report(report));
    });
  }
  return report;
}

}  // namespace rtswe
