#include "broadcastlab/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "broadcastlab/contextuality.hpp"
#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/fixedpoint.hpp"
#include "broadcastlab/io.hpp"
#include "broadcastlab/random.hpp"

namespace broadcastlab::cli {

using io::Json;

namespace {

struct Config {
  std::string command;
  std::string input;
  std::string output;
  std::string csv;
  std::optional<double> tol;
  std::optional<double> epsilon;
  std::uint64_t seed = 12345;
  std::size_t budget = defaults::dykstra_budget;
  std::size_t window_cycles = defaults::dykstra_window;
  Index levels = 0;
  Index window = 0;
  std::vector<Index> bins;
  std::vector<std::size_t> steps;
  std::vector<double> range;
  std::size_t random_inputs = 3;
};

struct CsvRow {
  std::string parameter;
  double residual = 0.0;
  double window_distance = std::numeric_limits<double>::quiet_NaN();
  double trace_defect = 0.0;
};

struct Outcome {
  Json result;
  std::vector<CsvRow> csv;
};

std::string num(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string csv_text(const std::vector<CsvRow>& rows) {
  std::string out = "parameter,residual,window_distance,trace_defect\n";
  for (const auto& r : rows)
    out += r.parameter + "," + num(r.residual) + "," + num(r.window_distance) + "," + num(r.trace_defect) + "\n";
  return out;
}

Json ops_json(const std::vector<Matrix>& ops) {
  Json arr = Json::array();
  for (const auto& m : ops) arr.push_back(io::to_json(m));
  return arr;
}

Json named(std::initializer_list<std::pair<const char*, double>> values) {
  Json arr = Json::array();
  for (const auto& [name, value] : values) arr.push_back({{"name", name}, {"value", value}});
  return arr;
}

Json require_input(const Config& c) {
  if (c.input.empty()) throw Error(ErrorKind::invalid_input, c.command + ": --input is required");
  return io::read_file(c.input);
}

double tol_or(const Config& c, double fallback) {
  const double t = c.tol.value_or(fallback);
  if (!(t > 0.0)) throw Error(ErrorKind::invalid_input, "--tol must be positive");
  return t;
}

// ---------------------------------------------------------------------------

Outcome fixpoints(Config& c, Json& cfg) {
  const Channel ch = io::channel_from_json(require_input(c));
  const double tol = tol_or(c, defaults::fixed_space);
  const std::size_t terms = c.steps.empty() ? 2000 : c.steps.front();
  cfg["tol"] = tol;
  cfg["cesaro_terms"] = terms;

  Outcome o;
  Json& r = o.result;
  r["d_in"] = d_in(ch);
  r["d_out"] = d_out(ch);

  auto space_json = [](const FixedPointSpace& fs) {
    return Json{{"dimension", fs.dimension()},
                {"threshold", fs.threshold()},
                {"singular_values", fs.singular_values()},
                {"max_residual", fs.max_residual()},
                {"basis", ops_json(fs.basis())}};
  };

  std::optional<FixedPointSpace> space;
  std::optional<BroadcastingAlgebra> alg;
  if (const auto* mp = std::get_if<MeasurePrepareChannel>(&ch)) {
    r["kind"] = "measure_prepare";
    alg = BroadcastingAlgebra::from_eb(*mp, tol);
    space = alg->space();
  } else if (d_out(ch) == d_in(ch) * d_in(ch)) {
    r["kind"] = "broadcasting";
    const KrausChannel k = std::holds_alternative<KrausChannel>(ch) ? std::get<KrausChannel>(ch)
                                                                     : choi_to_kraus(std::get<ChoiMatrix>(ch));
    alg = BroadcastingAlgebra::from_symmetric(k, tol);
    space = alg->space();
  } else {
    r["kind"] = std::holds_alternative<KrausChannel>(ch) ? "kraus" : "choi";
    space = fixed_space(ch, tol);
  }
  r["fixed_space"] = space_json(*space);

  // ψ₀ against the Cesàro mean on a seeded random input.
  Rng rng(c.seed);
  const Matrix a = random_hermitian(space->dim(), rng);
  const CesaroResult ces = cesaro_apply(space->superop(), a, terms, 1e-13);
  r["cesaro"] = {{"terms", ces.terms},
                 {"converged", ces.converged},
                 {"step_change", ces.step_change},
                 {"fixed_residual", ces.fixed_residual},
                 {"distance_to_projector", (ces.value - space->project(a)).norm()}};

  if (alg) {
    const auto& table = alg->product_table();
    Json t = Json::array();
    for (const auto& row : table) {
      Json jr = Json::array();
      for (const auto& v : row) jr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
      t.push_back(std::move(jr));
    }
    r["algebra"] = {{"idempotency_residual", alg->idempotency_residual()},
                    {"cp_min_eigenvalue", alg->cp_min_eigenvalue()},
                    {"commutativity_residual", alg->commutativity_residual()},
                    {"associativity_residual", alg->associativity_residual()},
                    {"unit_residual", alg->unit_residual()},
                    {"product_table", std::move(t)}};
    const AtomicDecomposition dec = atomic_decomposition(*alg, c.seed);
    r["atoms"] = {{"povm", ops_json(dec.povm)},
                  {"states", ops_json(dec.states)},
                  {"state_repair", dec.state_repair},
                  {"draws", dec.draws},
                  {"min_gap", dec.min_gap},
                  {"biorthogonality_residual", dec.biorthogonality_residual},
                  {"completeness_residual", dec.completeness_residual},
                  {"idempotence_residual", dec.idempotence_residual}};
    double recon = 0.0;
    for (const auto& b : space->basis()) recon = std::max(recon, (dec.reconstruct(b) - b).norm());
    r["atoms"]["reconstruction_residual"] = recon;
  }
  return o;
}

Outcome check_states_cmd(Config& c, Json& cfg) {
  const auto states = io::states_from_json(require_input(c));
  if (!states.empty()) require_within_cap(states.front().dim(), "check-states");
  const double tol = tol_or(c, defaults::commutator);
  cfg["tol"] = tol;
  const StateSetVerdict v = check_states(states, tol);
  Outcome o;
  Json& r = o.result;
  r["verdict"] = to_string(v.verdict);
  r["max_commutator"] = v.max_commutator;
  r["pair"] = {v.pair.first, v.pair.second};
  r["witness"] = v.witness ? io::to_json(*v.witness) : Json(nullptr);
  r["broadcaster"] = v.broadcaster ? io::to_json(*v.broadcaster) : Json(nullptr);
  r["residuals"] = named({{"max_commutator", v.max_commutator},
                          {"witness_fixed_trace_norm", v.witness_residual},
                          {"broadcaster_marginal_trace_norm", v.broadcaster_residual}});
  r["notes"] = v.notes;
  return o;
}

Outcome check_meas_cmd(Config& c, Json& cfg) {
  const Json in = require_input(c);
  io::require_keys(in, {"effects"}, {"effects"}, "$");
  FeasibilityProblem p;
  p.effects = io::effects_from_json(in);
  if (p.effects.empty()) throw Error(ErrorKind::invalid_input, "$.effects: empty list");
  p.dim = p.effects.front().rows();
  p.tol = tol_or(c, defaults::dykstra_tol);
  p.budget = c.budget;
  p.stall_window = c.window_cycles;
  cfg["tol"] = p.tol;
  cfg["budget"] = p.budget;
  cfg["stall_window"] = p.stall_window;
  cfg["history_stride"] = p.history_stride;

  const MeasSetVerdict v = check_measurements_feasibility(p);
  const WitnessCheck chk = check_witness(p, v.choi);
  Outcome o;
  Json& r = o.result;
  r["verdict"] = to_string(v.status);
  r["witness"] = v.witness ? io::to_json(*v.witness) : Json(nullptr);
  r["choi"] = io::to_json(v.choi);
  Json hist = Json::array();
  for (std::size_t i = 0; i < v.residuals.size(); ++i) {
    const std::size_t cycle = std::min((i + 1) * p.history_stride, v.cycles);
    hist.push_back({{"cycle", cycle}, {"value", v.residuals[i]}});
  }
  r["residuals"] = std::move(hist);
  r["best_residual"] = v.best_residual;
  r["final_residual"] = v.final_residual;
  r["cycles"] = v.cycles;
  r["recheck"] = {{"psd_violation", chk.psd_violation},
                  {"ppt_violation", chk.ppt_violation},
                  {"trace_residual", chk.trace_residual},
                  {"fixed_residuals", chk.fixed_residuals}};
  r["notes"] = v.notes;
  return o;
}

Outcome pvm_embed_cmd(Config& c, Json& cfg) {
  const io::PvmInput in = io::pvm_from_json(require_input(c));
  const double tol = tol_or(c, defaults::pvm);
  cfg["tol"] = tol;
  const PartitionEmbedding e = pvm_embed(in.outcomes, in.subsets, tol);
  Outcome o;
  Json& r = o.result;
  Json atoms = Json::array();
  for (const auto& a : e.atoms)
    atoms.push_back({{"index", a.index}, {"outcomes", a.outcomes}, {"rank", a.rank}, {"projection", io::to_json(a.projection)}});
  r["atoms"] = std::move(atoms);
  r["index_sets"] = e.index_sets;
  r["witness"] = e.channel ? io::to_json(*e.channel) : Json(nullptr);
  r["residuals"] = e.residuals;
  r["max_residual"] = e.max_residual();
  return o;
}

Outcome approx_check_cmd(Config& c, Json& cfg) {
  const Json in = require_input(c);
  io::require_keys(in, {"effects", "channel", "epsilon"}, {"effects", "channel"}, "$");
  const auto effects = io::effects_from_json(in);
  const Channel ch = io::channel_from_json(in.at("channel"), "$.channel");
  const auto* mp = std::get_if<MeasurePrepareChannel>(&ch);
  if (!mp) throw Error(ErrorKind::invalid_input, "$.channel: a measure_prepare channel is required");
  double eps = 0.0;
  if (c.epsilon) {
    eps = *c.epsilon;
  } else if (in.contains("epsilon")) {
    if (!in.at("epsilon").is_number()) throw Error(ErrorKind::invalid_input, "$.epsilon: expected a number");
    eps = in.at("epsilon").get<double>();
  } else {
    throw Error(ErrorKind::invalid_input, "approx-check: epsilon missing (input field or --epsilon)");
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::invalid_input, "approx-check: epsilon must be positive");
  cfg["epsilon"] = eps;
  const ApproxCheck a = approx_check(effects, *mp, eps);
  Outcome o;
  o.result = {{"verdict", a.all_pass ? "pass" : "fail"},
              {"deviations", a.deviations},
              {"pass", a.pass},
              {"epsilon", a.epsilon}};
  return o;
}

Outcome cv_q(Config& c, Json& cfg) {
  const Index n = c.levels ? c.levels : 24;
  const Index w = c.window ? c.window : 8;
  std::vector<std::size_t> lengths = c.steps;
  if (lengths.empty()) lengths = {1, 10, 100, 1000, 10000, 100000, 1000000};
  const double target = tol_or(c, 1e-3);
  const Index bound = std::min<Index>(n, 12);
  cfg["levels"] = n;
  cfg["window"] = w;
  cfg["steps"] = lengths;
  cfg["tol"] = target;
  cfg["random_inputs"] = c.random_inputs;
  cfg["quadrature_bound"] = bound;

  const QChannel ch = qchannel_build(FockTruncation(n));
  const QuadratureAgreement qa = qchannel_validate(bound);
  const QWindowReport rep = qchannel_fixed_analysis(ch, w, lengths, c.random_inputs, c.seed);

  Matrix vac = Matrix::Zero(n, n);
  vac(0, 0) = 1.0;
  const Matrix img = ch.apply(vac);
  double thermal = 0.0;
  for (Index m = 0; m < n; ++m) thermal = std::max(thermal, std::abs(img(m, m).real() - std::ldexp(1.0, -static_cast<int>(m) - 1)));

  Outcome o;
  Json& r = o.result;
  r["quadrature"] = {{"max_deviation", qa.max_deviation},
                     {"elements", qa.elements},
                     {"worst", {qa.worst[0], qa.worst[1], qa.worst[2], qa.worst[3]}}};
  r["vacuum_image_deviation"] = thermal;
  r["ladder"] = rep.ladder;
  r["top_eigenvalue"] = rep.top_eigenvalue;
  r["slem"] = rep.slem;
  r["trace_defect_bound"] = rep.trace_defect_bound;
  r["trace_defects"] = ch.trace_defects();
  r["self_adjointness"] = rep.self_adjointness;
  r["identity_window_deviation"] = rep.identity_window_deviation;
  Json series = Json::array();
  for (const auto& s : rep.series) {
    Json rows = Json::array();
    for (const auto& row : s.rows)
      rows.push_back({{"length", row.length},
                      {"window_distance", row.window_distance},
                      {"relative", row.relative},
                      {"flatness", row.flatness}});
    series.push_back({{"input", s.input}, {"input_window_distance", s.input_window_distance}, {"rows", std::move(rows)}});
  }
  r["series"] = std::move(series);

  for (const auto& s : rep.series)
    for (const auto& row : s.rows)
      o.csv.push_back({s.input + ":" + std::to_string(row.length), row.relative, row.window_distance, rep.trace_defect_bound});
  return o;
}

Outcome cv_shift(Config& c, Json& cfg) {
  const Index n = c.levels ? c.levels : 16;
  const Index w = c.window ? c.window : 4;
  std::vector<std::size_t> steps = c.steps;
  if (steps.empty()) steps = {10, 100, 1000};
  const double tol = tol_or(c, 1e-9);
  cfg["levels"] = n;
  cfg["window"] = w;
  cfg["steps"] = steps;
  cfg["tol"] = tol;
  cfg["random_inputs"] = c.random_inputs;

  const ShiftStudy st = shift_channel_study(FockTruncation(n), w, steps, c.random_inputs, c.seed, tol);
  Outcome o;
  Json& r = o.result;
  r["ladder_error"] = st.ladder_error;
  Json rows = Json::array();
  bool bound_ok = true;
  for (const auto& m : st.window_mass) {
    rows.push_back({{"initial", m.initial}, {"steps", m.steps}, {"mass", m.mass}, {"bound", m.bound}});
    bound_ok = bound_ok && m.mass <= m.bound + 1e-12;
    // residual: how far the mass sits above w/n (0 when the bound holds)
    o.csv.push_back({m.initial + ":" + std::to_string(m.steps), std::max(0.0, m.mass - m.bound), m.mass,
                     st.trace_defect_bound});
  }
  r["window_mass"] = std::move(rows);
  r["window_bound_holds"] = bound_ok;
  r["fixed_dimension"] = st.fixed_dimension;
  r["smallest_singular_value"] = st.smallest_singular_value;
  r["threshold"] = st.threshold;
  r["trace_defect_bound"] = st.trace_defect_bound;
  return o;
}

Outcome cv_position(Config& c, Json& cfg) {
  const Index n = c.levels ? c.levels : 32;
  std::vector<Index> bins = c.bins;
  if (bins.empty()) bins = {2, 4, 8, 16};
  std::vector<double> range = c.range;
  if (range.empty()) range = {-3.0, 3.0};
  if (range.size() != 2) throw Error(ErrorKind::invalid_input, "--range expects two numbers a,b");
  cfg["levels"] = n;
  cfg["bins"] = bins;
  cfg["range"] = range;
  cfg["quadrature_tol"] = defaults::quadrature;

  Outcome o;
  Json rows = Json::array();
  const FockTruncation trunc(n);
  for (Index b : bins) {
    const PositionEmbeddingRow row = position_embedding(range[0], range[1], b, trunc);
    rows.push_back({{"n_bins", row.n_bins},
                    {"repair_distance", row.repair_distance},
                    {"embedded_residual", row.embedded_residual},
                    {"original_residual", row.original_residual},
                    {"max_commutator", row.max_commutator},
                    {"completeness_defect", row.completeness_defect}});
    o.csv.push_back({std::to_string(b), row.original_residual, std::numeric_limits<double>::quiet_NaN(),
                     row.completeness_defect});
  }
  o.result["sweep"] = std::move(rows);
  return o;
}

Outcome roundtrip_cmd(Config& c, Json&) {
  if (c.input.empty()) throw Error(ErrorKind::invalid_input, "roundtrip: --input is required");
  const io::RoundTrip rt = io::io_roundtrip(c.input);
  Outcome o;
  o.result = {{"kind", rt.kind}, {"equal", rt.equal}, {"matches_input", rt.matches_input}, {"object", rt.first}};
  return o;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::cap_exceeded: return exit_cap;
    case ErrorKind::numerical_failure:
    case ErrorKind::no_spectral_gap: return exit_numerical;
    default: return exit_input;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::invalid_input, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorKind::invalid_input, "write to '" + path + "' failed");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed points of entanglement-breaking channels and contextuality checks", "broadcastlab"};
  app.require_subcommand(1);
  Config c;

  using Handler = std::function<Outcome(Config&, Json&)>;
  std::vector<std::pair<CLI::App*, Handler>> commands;

  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input,-i", c.input, "input JSON file");
    sub->add_option("--output,-o", c.output, "report path (stdout when omitted)");
    sub->add_option("--seed", c.seed, "64-bit seed for randomized steps");
    commands.emplace_back(sub, std::move(h));
    return sub;
  };
  auto tol = [&](CLI::App* s) { s->add_option("--tol", c.tol, "tolerance override"); };
  auto csv = [&](CLI::App* s) { s->add_option("--csv", c.csv, "also write a sweep table"); };

  auto* fp = add("fixpoints", "fixed space, broadcasting algebra and atoms of a channel", fixpoints);
  tol(fp);
  fp->add_option("--steps", c.steps, "Cesàro terms")->expected(1);
  tol(add("check-states", "decide whether a state family is non-confirming", check_states_cmd));
  auto* cm = add("check-meas", "EB fixed-point feasibility for a set of effects", check_meas_cmd);
  tol(cm);
  cm->add_option("--budget", c.budget, "Dykstra cycle budget")->check(CLI::PositiveNumber);
  cm->add_option("--window", c.window_cycles, "stall window in cycles")->check(CLI::PositiveNumber);
  tol(add("pvm-embed", "partition embedding of PVM unions", pvm_embed_cmd));
  add("approx-check", "epsilon criterion for a measure-prepare channel", approx_check_cmd)
      ->add_option("--epsilon", c.epsilon, "override the input epsilon");
  auto* q = add("cv-q", "truncated Husimi-Q channel", cv_q);
  tol(q);
  csv(q);
  q->add_option("--levels", c.levels, "Fock levels")->check(CLI::Range(2, 1 << 20));
  q->add_option("--window", c.window, "window levels")->check(CLI::PositiveNumber);
  q->add_option("--steps", c.steps, "Cesàro lengths")->delimiter(',');
  q->add_option("--random-inputs", c.random_inputs, "random Hermitian inputs");
  auto* sh = add("cv-shift", "truncated shift channel", cv_shift);
  tol(sh);
  csv(sh);
  sh->add_option("--levels", c.levels, "Fock levels")->check(CLI::Range(2, 1 << 20));
  sh->add_option("--window", c.window, "window levels")->check(CLI::PositiveNumber);
  sh->add_option("--steps", c.steps, "Cesàro lengths")->delimiter(',');
  sh->add_option("--random-inputs", c.random_inputs, "random initial states");
  auto* pos = add("cv-position", "binned position measurement sweep", cv_position);
  csv(pos);
  pos->add_option("--levels", c.levels, "Fock levels")->check(CLI::Range(2, 1 << 20));
  pos->add_option("--bins", c.bins, "bin counts")->delimiter(',')->check(CLI::PositiveNumber);
  pos->add_option("--range", c.range, "interval a,b")->delimiter(',');
  add("roundtrip", "parse and re-serialize a JSON document", roundtrip_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }

  for (auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    c.command = sub->get_name();
    try {
      Json cfg = {{"command", c.command}, {"input", c.input}, {"seed", c.seed},
                  {"dimension_cap", dimension_cap()}};
      Outcome o = handler(c, cfg);
      const Json report = {{"config", cfg}, {"result", std::move(o.result)}};
      const std::string text = io::dump(report);
      if (!c.csv.empty()) write_text(c.csv, csv_text(o.csv));
      if (c.output.empty()) {
        out << text;
      } else {
        write_text(c.output, text);
      }
      return exit_ok;
    } catch (const Error& e) {
      err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
      return exit_for(e.kind());
    } catch (const Json::exception& e) {
      err << "error [invalid_input]: " << e.what() << "\n";
      return exit_input;
    } catch (const std::exception& e) {
      err << "error [numerical_failure]: " << e.what() << "\n";
      return exit_numerical;
    }
  }
  return exit_input;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"broadcastlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace broadcastlab::cli
