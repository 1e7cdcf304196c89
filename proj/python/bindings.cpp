#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rtswe/pipeline.hpp"

namespace py = pybind11;
using namespace rtswe;

namespace {

py::dict invariant_dict(const InvariantValues& v) {
  py::dict d;
  d["H"] = v.H;
  d["M"] = v.M;
  d["Q"] = v.Q;
  d["B"] = v.B;
  return d;
}

/// (K+1) x 4 array with columns H, M, Q, B.
Matrix invariant_table(const std::vector<InvariantValues>& series) {
  Matrix out(static_cast<Index>(series.size()), 4);
  for (std::size_t k = 0; k < series.size(); ++k) {
    out.row(static_cast<Index>(k)) << series[k].H, series[k].M, series[k].Q, series[k].B;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rotating thermal shallow water solver and structure-preserving reduced models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<NewtonError>(m, "NewtonError", numeric.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init(&build_grid), py::arg("n"), py::arg("lx"), py::arg("ly"), py::arg("x0") = 0.0,
           py::arg("y0") = 0.0)
      .def_readonly("n", &Grid::n)
      .def_readonly("dx", &Grid::dx)
      .def_readonly("dy", &Grid::dy)
      .def_readonly("N", &Grid::N)
      .def("index", &Grid::index);

  py::class_<DoubleVortexConfig>(m, "DoubleVortexConfig")
      .def(py::init<>())
      .def_readwrite("L", &DoubleVortexConfig::L)
      .def_readwrite("f", &DoubleVortexConfig::f)
      .def_readwrite("g", &DoubleVortexConfig::g)
      .def_readwrite("H0", &DoubleVortexConfig::H0)
      .def_readwrite("dh", &DoubleVortexConfig::dh)
      .def_readwrite("sigma_x", &DoubleVortexConfig::sigma_x)
      .def_readwrite("sigma_y", &DoubleVortexConfig::sigma_y)
      .def_readwrite("ox", &DoubleVortexConfig::ox)
      .def_readwrite("oy", &DoubleVortexConfig::oy)
      .def_readwrite("n", &DoubleVortexConfig::n)
      .def_readwrite("K", &DoubleVortexConfig::K)
      .def_readwrite("dt", &DoubleVortexConfig::dt)
      .def_readwrite("kappa_pod", &DoubleVortexConfig::kappa_pod)
      .def_readwrite("kappa_deim", &DoubleVortexConfig::kappa_deim)
      .def_readwrite("r", &DoubleVortexConfig::r_override)
      .def_readwrite("p", &DoubleVortexConfig::p_override)
      .def("validate", &DoubleVortexConfig::validate)
      .def("grid", &DoubleVortexConfig::grid);

  py::class_<NewtonConfig>(m, "NewtonConfig")
      .def(py::init<>())
      .def_readwrite("tol", &NewtonConfig::tol)
      .def_readwrite("max_iter", &NewtonConfig::max_iter);
  m.def("rom_newton_defaults", &rom_newton_defaults);

  py::class_<Model>(m, "Model")
      .def_readonly("grid", &Model::grid)
      .def_property_readonly("f", [](const Model& mo) { return mo.physics.f; })
      .def_property_readonly("g", [](const Model& mo) { return mo.physics.g; })
      .def_property_readonly("N", &Model::N);
  m.def("make_model", &make_model, py::arg("grid"), py::arg("f"), py::arg("g"));
  m.def("benchmark_model", &benchmark_model, py::arg("config"));

  m.def("double_vortex_initial",
        [](const DoubleVortexConfig& c) { return double_vortex_initial(c, c.grid()).z; },
        py::arg("config"), "Stacked initial state (h, u, v, s) of length 4N.");
  m.def("rhs", [](const Vector& z, const Model& mo) { return rhs(z, mo.physics, mo.ops); });
  m.def("grad_hamiltonian",
        [](const Vector& z, const Model& mo) { return grad_hamiltonian(z, mo.physics); });
  m.def("potential_vorticity", [](const Vector& z, const Model& mo) {
    return potential_vorticity(z, mo.physics, mo.ops);
  });
  m.def("invariants", [](const Vector& z, const Model& mo) {
    return invariant_dict(invariants(z, mo.physics, mo.grid, mo.ops));
  });
  m.def(
      "avf_step",
      [](const Vector& z, double dt, const Model& mo, const NewtonConfig& nc) {
        py::gil_scoped_release release;
        return avf_step(State(z), dt, mo, nc).z;
      },
      py::arg("z"), py::arg("dt"), py::arg("model"), py::arg("newton") = NewtonConfig{});
  m.def(
      "integrate_fom",
      [](const Vector& z0, double dt, int steps, const Model& mo, const NewtonConfig& nc) {
        FomTrajectory tr;
        {
          py::gil_scoped_release release;
          tr = integrate_fom(State(z0), dt, steps, mo, nc);
        }
        return py::make_tuple(tr.states, invariant_table(tr.invariants));
      },
      py::arg("z0"), py::arg("dt"), py::arg("steps"), py::arg("model"),
      py::arg("newton") = NewtonConfig{},
      "Returns (states 4N x (K+1), invariants (K+1) x 4 with columns H, M, Q, B).");

  py::class_<PodBasis>(m, "PodBasis")
      .def_readonly("r", &PodBasis::r)
      .def_readonly("V", &PodBasis::V)
      .def_readonly("mean", &PodBasis::mean)
      .def_readonly("sigma", &PodBasis::sigma)
      .def_readonly("criterion_rank", &PodBasis::criterion_rank)
      .def("lift", [](const PodBasis& b, const Vector& c) { return lift(b, c); })
      .def("restrict", [](const PodBasis& b, const Vector& z) { return restrict_state(b, z); });
  m.def(
      "build_pod_basis",
      [](const Matrix& states, double kappa, std::optional<int> r) {
        return build_pod_basis(collect_snapshots(states), kappa, r);
      },
      py::arg("states"), py::arg("kappa") = 1e-3, py::arg("r") = py::none());
  m.def("truncate_rank", &truncate_rank, py::arg("spectrum"), py::arg("kappa"));

  py::class_<DeimOperator>(m, "DeimOperator")
      .def_readonly("phi", &DeimOperator::phi)
      .def_readonly("psi", &DeimOperator::psi)
      .def_readonly("indices", &DeimOperator::indices)
      .def_readonly("condition", &DeimOperator::condition);
  py::class_<DeimSet>(m, "DeimSet")
      .def_readonly("p", &DeimSet::p)
      .def_readonly("op", &DeimSet::op)
      .def_readonly("criterion_rank", &DeimSet::criterion_rank);
  m.def(
      "build_deim",
      [](const Matrix& states, const PodBasis& basis, const Model& mo, double kappa,
         std::optional<int> p) {
        return build_deim(collect_nonlin_snapshots(states, basis, mo.physics, mo.ops), kappa, p);
      },
      py::arg("states"), py::arg("basis"), py::arg("model"), py::arg("kappa") = 1e-5,
      py::arg("p") = py::none());
  m.def("nonlinearity", [](int j, const Vector& z, const Model& mo) {
    return nonlinearity(j, z, mo.physics, mo.ops);
  });

  py::class_<RomOperators>(m, "RomOperators")
      .def_property_readonly("r", &RomOperators::r)
      .def_property_readonly("p", &RomOperators::p);
  m.def(
      "precompute_rom",
      [](const PodBasis& b, const DeimSet& d, const Model& mo, int threads) {
        py::gil_scoped_release release;
        return precompute_rom(b, d, mo, threads);
      },
      py::arg("basis"), py::arg("deim"), py::arg("model"), py::arg("threads") = 1);
  m.def("rom_rhs", [](const Vector& c, const RomOperators& ops) {
    return rom_rhs(RomState{c, 0.0}, ops);
  });
  m.def(
      "integrate_rom",
      [](const Vector& c0, double dt, int steps, const RomOperators& ops) {
        py::gil_scoped_release release;
        return integrate_rom(RomState{c0, 0.0}, dt, steps, ops, rom_newton_defaults(), false).coeffs;
      },
      py::arg("c0"), py::arg("dt"), py::arg("steps"), py::arg("ops"));
  m.def(
      "integrate_pod_rom",
      [](const Vector& c0, double dt, int steps, const PodBasis& b, const Model& mo) {
        py::gil_scoped_release release;
        return integrate_pod_rom(RomState{c0, 0.0}, dt, steps, b, mo, rom_newton_defaults(), false)
            .coeffs;
      },
      py::arg("c0"), py::arg("dt"), py::arg("steps"), py::arg("basis"), py::arg("model"));
  m.def("lift_trajectory", &lift_trajectory, py::arg("basis"), py::arg("coeffs"));

  m.def("relative_L2_error", &relative_L2_error, py::arg("reference"), py::arg("approx"),
        py::arg("grid"));
  m.def(
      "invariant_errors",
      [](const Matrix& table) {
        std::vector<InvariantValues> series;
        for (Index k = 0; k < table.rows(); ++k) {
          series.push_back({table(k, 0), table(k, 1), table(k, 2), table(k, 3)});
        }
        const InvariantErrors e = invariant_error_series(series);
        return py::make_tuple(e.mean, e.max);
      },
      py::arg("table"), "Mean and max relative drift of each column of an invariant table.");

  m.def(
      "run_pipeline",
      [](const DoubleVortexConfig& c, std::optional<std::filesystem::path> out, int threads) {
        RunSettings s;
        s.bench = c;
        s.threads = threads;
        RunReport rep;
        {
          py::gil_scoped_release release;
          rep = run_pipeline(s, out);
        }
        return to_report(rep);
      },
      py::arg("config"), py::arg("out") = py::none(), py::arg("threads") = 1,
      "Full benchmark pipeline; returns the flat report written to report.json.");
}
