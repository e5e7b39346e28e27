#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "broadcastlab/cli.hpp"
#include "broadcastlab/contextuality.hpp"
#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/fixedpoint.hpp"

namespace py = pybind11;
using namespace broadcastlab;

namespace {

std::vector<DensityOperator> densities(const std::vector<Matrix>& ms) {
  std::vector<DensityOperator> out;
  for (std::size_t i = 0; i < ms.size(); ++i) out.emplace_back(ms[i]);
  return out;
}

MeasurePrepareChannel mp_channel(const std::vector<Matrix>& povm, const std::vector<Matrix>& states) {
  std::vector<Effect> effects;
  for (const auto& g : povm) effects.emplace_back(g);
  return MeasurePrepareChannel(DiscretePOVM(std::move(effects)), densities(states));
}

py::dict state_verdict(const std::vector<Matrix>& states, double tol) {
  const StateSetVerdict v = check_states(densities(states), tol);
  py::dict d;
  d["verdict"] = to_string(v.verdict);
  d["max_commutator"] = v.max_commutator;
  d["pair"] = py::make_tuple(v.pair.first, v.pair.second);
  if (v.verdict == StateVerdict::non_confirming) {
    d["basis"] = v.basis;
    d["witness_residual"] = v.witness_residual;
    d["broadcaster_residual"] = v.broadcaster_residual;
  }
  return d;
}

py::dict fixed_points(const std::vector<Matrix>& kraus, double tol) {
  const FixedPointSpace fs = fixed_space(Channel(KrausChannel(kraus)), tol);
  py::dict d;
  d["dimension"] = fs.dimension();
  d["basis"] = fs.basis();
  d["singular_values"] = fs.singular_values();
  d["max_residual"] = fs.max_residual();
  return d;
}

py::dict atoms(const std::vector<Matrix>& povm, const std::vector<Matrix>& states, std::uint64_t seed) {
  const auto alg = BroadcastingAlgebra::from_eb(mp_channel(povm, states));
  const AtomicDecomposition dec = atomic_decomposition(alg, seed);
  py::dict d;
  d["povm"] = dec.povm;
  d["states"] = dec.states;
  d["biorthogonality_residual"] = dec.biorthogonality_residual;
  d["completeness_residual"] = dec.completeness_residual;
  return d;
}

py::dict embed(const std::vector<Matrix>& projections, double tol) {
  const PartitionEmbedding e = pvm_embed(projections, tol);
  py::list atom_list;
  for (const auto& a : e.atoms) {
    py::dict ad;
    ad["index"] = a.index;
    ad["rank"] = a.rank;
    ad["projection"] = a.projection;
    atom_list.append(ad);
  }
  py::dict d;
  d["atoms"] = atom_list;
  d["index_sets"] = e.index_sets;
  d["residuals"] = e.residuals;
  d["max_residual"] = e.max_residual();
  return d;
}

py::dict feasibility(const std::vector<Matrix>& effects, std::size_t budget, double tol) {
  if (effects.empty()) throw Error(ErrorKind::invalid_input, "check_measurements: no effects");
  FeasibilityProblem p;
  p.effects = effects;
  p.dim = effects.front().rows();
  p.budget = budget;
  p.tol = tol;
  const MeasSetVerdict v = check_measurements_feasibility(p);
  py::dict d;
  d["status"] = to_string(v.status);
  d["best_residual"] = v.best_residual;
  d["final_residual"] = v.final_residual;
  d["cycles"] = v.cycles;
  d["choi"] = v.choi;
  d["has_witness"] = v.witness.has_value();
  d["notes"] = v.notes;
  return d;
}

py::dict approx(const std::vector<Matrix>& effects, const std::vector<Matrix>& povm,
                const std::vector<Matrix>& states, double epsilon) {
  const ApproxCheck a = approx_check(effects, mp_channel(povm, states), epsilon);
  py::dict d;
  d["deviations"] = a.deviations;
  d["pass"] = a.pass;
  d["all_pass"] = a.all_pass;
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_broadcastlab, m) {
  m.doc() = "Fixed points of entanglement-breaking channels and contextuality checks";

  static py::exception<Error> error(m, "BroadcastlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("check_states", &state_verdict, py::arg("states"), py::arg("tol") = defaults::commutator,
        "Decide whether a family of density matrices is contextuality non-confirming.");
  m.def("fixed_space", &fixed_points, py::arg("kraus"), py::arg("tol") = defaults::fixed_space,
        "Fixed points of the Heisenberg map of a Kraus channel.");
  m.def("atomic_decomposition", &atoms, py::arg("povm"), py::arg("states"), py::arg("seed") = 12345,
        "Atoms of the fixed-point algebra of a measure-prepare channel.");
  m.def("pvm_embed", &embed, py::arg("projections"), py::arg("tol") = defaults::pvm,
        "Measure-prepare channel fixing commuting projections.");
  m.def("check_measurements", &feasibility, py::arg("effects"), py::arg("budget") = defaults::dykstra_budget,
        py::arg("tol") = defaults::dykstra_tol, "EB fixed-point feasibility for a set of effects.");
  m.def("approx_check", &approx, py::arg("effects"), py::arg("povm"), py::arg("states"), py::arg("epsilon"),
        "Per-effect deviation max|eig(Λ*(E) − E)| against epsilon.");
  m.def("qchannel_element", [](Index a, Index b, Index c, Index d) { return qchannel_element(a, b, c, d); },
        py::arg("m"), py::arg("n"), py::arg("j"), py::arg("k"), "⟨m|Λ(|j⟩⟨k|)|n⟩ of the Husimi-Q channel.");
  m.def("interval_effect", [](double lo, double hi, Index levels) { return interval_effect(lo, hi, levels); },
        py::arg("lo"), py::arg("hi"), py::arg("levels"), "Position effect Q([lo, hi]) in the Fock basis.");
  m.def("run_cli", &run_cli, py::arg("args"),
        "Run a command-line invocation in-process; returns (exit_code, stdout, stderr).");
}
