#include "broadcastlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace broadcastlab::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::invalid_input, path + ": " + msg);
}

Index positive_int(const Json& j, const std::string& key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) schema_error(path + "." + key, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

const Json& array_field(const Json& j, const std::string& key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_array()) schema_error(path + "." + key, "expected an array");
  return v;
}

// Re-raises constructor failures with the location of the offending value.
template <class F>
auto located(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void require_keys(const Json& j, const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(path + "." + key, "unknown field");
    }
  }
  for (const auto& key : required)
    if (!j.contains(key)) schema_error(path + "." + key, "missing required field");
}

Json to_json(const Matrix& m) {
  Json entries = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"dim_row", m.rows()}, {"dim_col", m.cols()}, {"entries", std::move(entries)}};
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  require_keys(j, {"dim_row", "dim_col", "entries"}, {"dim_row", "dim_col", "entries"}, path);
  const Index rows = positive_int(j, "dim_row", path);
  const Index cols = positive_int(j, "dim_col", path);
  const Json& entries = array_field(j, "entries", path);
  if (static_cast<Index>(entries.size()) != rows * cols) {
    schema_error(path + ".entries", "expected " + std::to_string(rows * cols) + " entries, found " +
                                        std::to_string(entries.size()));
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows * cols; ++i) {
    const Json& e = entries[static_cast<std::size_t>(i)];
    const std::string where = path + ".entries[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      schema_error(where, "expected [re, im]");
    }
    const double re = e[0].get<double>(), im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) schema_error(where, "entry is not finite");
    m(i / cols, i % cols) = Complex(re, im);
  }
  return m;
}

Json to_json(const KrausChannel& ch) {
  Json ops = Json::array();
  for (const auto& k : ch.ops()) ops.push_back(to_json(k));
  return {{"kind", "kraus"}, {"d_in", ch.d_in()}, {"d_out", ch.d_out()}, {"kraus", std::move(ops)}};
}

Json to_json(const ChoiMatrix& ch) {
  return {{"kind", "choi"}, {"d_in", ch.d_in()}, {"d_out", ch.d_out()}, {"choi", to_json(ch.matrix())}};
}

Json to_json(const MeasurePrepareChannel& ch) {
  Json effects = Json::array(), states = Json::array();
  for (const auto& e : ch.povm().effects()) effects.push_back(to_json(e.matrix()));
  for (const auto& s : ch.states()) states.push_back(to_json(s.matrix()));
  return {{"kind", "measure_prepare"}, {"d_in", ch.d_in()},         {"d_out", ch.d_out()},
          {"effects", std::move(effects)}, {"states", std::move(states)}, {"labels", ch.povm().labels()}};
}

Json to_json(const Channel& ch) {
  return std::visit([](const auto& c) { return to_json(c); }, ch);
}

DensityOperator state_from_json(const Json& j, const std::string& path) {
  const Matrix m = matrix_from_json(j, path);
  return located(path, [&] { return DensityOperator(m); });
}

Effect effect_from_json(const Json& j, const std::string& path) {
  const Matrix m = matrix_from_json(j, path);
  return located(path, [&] { return Effect(m); });
}

Channel channel_from_json(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    schema_error(path + ".kind", "expected \"kraus\", \"choi\" or \"measure_prepare\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  auto dims_match = [&](Index din, Index dout) {
    if (positive_int(j, "d_in", path) != din || positive_int(j, "d_out", path) != dout) {
      schema_error(path, "d_in/d_out disagree with the payload (" + std::to_string(din) + " → " +
                             std::to_string(dout) + ")");
    }
  };
  if (kind == "kraus") {
    require_keys(j, {"kind", "d_in", "d_out", "kraus"}, {"kind", "d_in", "d_out", "kraus"}, path);
    std::vector<Matrix> ops;
    const Json& arr = array_field(j, "kraus", path);
    for (std::size_t i = 0; i < arr.size(); ++i)
      ops.push_back(matrix_from_json(arr[i], path + ".kraus[" + std::to_string(i) + "]"));
    KrausChannel ch = located(path, [&] { return KrausChannel(ops); });
    dims_match(ch.d_in(), ch.d_out());
    return ch;
  }
  if (kind == "choi") {
    require_keys(j, {"kind", "d_in", "d_out", "choi"}, {"kind", "d_in", "d_out", "choi"}, path);
    const Index din = positive_int(j, "d_in", path), dout = positive_int(j, "d_out", path);
    const Matrix m = matrix_from_json(j.at("choi"), path + ".choi");
    return located(path, [&] { return ChoiMatrix(m, din, dout); });
  }
  if (kind == "measure_prepare") {
    require_keys(j, {"kind", "d_in", "d_out", "effects", "states", "labels"},
                 {"kind", "d_in", "d_out", "effects", "states"}, path);
    std::vector<Effect> effects;
    std::vector<DensityOperator> states;
    const Json& ea = array_field(j, "effects", path);
    const Json& sa = array_field(j, "states", path);
    for (std::size_t i = 0; i < ea.size(); ++i)
      effects.push_back(effect_from_json(ea[i], path + ".effects[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < sa.size(); ++i)
      states.push_back(state_from_json(sa[i], path + ".states[" + std::to_string(i) + "]"));
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      const Json& la = array_field(j, "labels", path);
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (!la[i].is_string()) schema_error(path + ".labels[" + std::to_string(i) + "]", "expected a string");
        labels.push_back(la[i].get<std::string>());
      }
    }
    MeasurePrepareChannel ch = located(path, [&] {
      return MeasurePrepareChannel(DiscretePOVM(std::move(effects), std::move(labels)), std::move(states));
    });
    dims_match(ch.d_in(), ch.d_out());
    return ch;
  }
  schema_error(path + ".kind", "unknown channel kind '" + kind + "'");
}

std::vector<DensityOperator> states_from_json(const Json& j) {
  require_keys(j, {"states"}, {"states"}, "$");
  std::vector<DensityOperator> out;
  const Json& arr = array_field(j, "states", "$");
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(state_from_json(arr[i], "$.states[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Matrix> effects_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("effects")) schema_error("$.effects", "missing required field");
  std::vector<Matrix> out;
  const Json& arr = array_field(j, "effects", "$");
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(effect_from_json(arr[i], "$.effects[" + std::to_string(i) + "]").matrix());
  return out;
}

PvmInput pvm_from_json(const Json& j) {
  require_keys(j, {"outcomes", "subsets"}, {"outcomes", "subsets"}, "$");
  PvmInput in;
  const Json& oa = array_field(j, "outcomes", "$");
  for (std::size_t i = 0; i < oa.size(); ++i) {
    const std::string path = "$.outcomes[" + std::to_string(i) + "]";
    require_keys(oa[i], {"label", "projection"}, {"label", "projection"}, path);
    if (!oa[i].at("label").is_string()) schema_error(path + ".label", "expected a string");
    in.outcomes.push_back({oa[i].at("label").get<std::string>(),
                           matrix_from_json(oa[i].at("projection"), path + ".projection")});
  }
  const Json& sa = array_field(j, "subsets", "$");
  for (std::size_t k = 0; k < sa.size(); ++k) {
    const std::string path = "$.subsets[" + std::to_string(k) + "]";
    if (!sa[k].is_array()) schema_error(path, "expected an array of labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < sa[k].size(); ++i) {
      if (!sa[k][i].is_string()) schema_error(path + "[" + std::to_string(i) + "]", "expected a string");
      labels.push_back(sa[k][i].get<std::string>());
    }
    in.subsets.push_back(std::move(labels));
  }
  return in;
}

namespace {

Json states_json(const std::vector<DensityOperator>& states) {
  Json arr = Json::array();
  for (const auto& s : states) arr.push_back(to_json(s.matrix()));
  return {{"states", std::move(arr)}};
}

Json effects_json(const std::vector<Matrix>& effects) {
  Json arr = Json::array();
  for (const auto& e : effects) arr.push_back(to_json(e));
  return {{"effects", std::move(arr)}};
}

Json pvm_json(const PvmInput& in) {
  Json outcomes = Json::array();
  for (const auto& o : in.outcomes) outcomes.push_back({{"label", o.label}, {"projection", to_json(o.projection)}});
  return {{"outcomes", std::move(outcomes)}, {"subsets", in.subsets}};
}

std::string detect_kind(const Json& j) {
  if (!j.is_object()) schema_error("$", "expected an object");
  if (j.contains("kind")) return "channel";
  if (j.contains("dim_row")) return "operator";
  if (j.contains("states")) return "states";
  if (j.contains("outcomes")) return "pvm";
  if (j.contains("effects")) return "effects";
  schema_error("$", "unrecognized document shape");
}

Json normalize(const std::string& kind, const Json& j) {
  if (kind == "channel") return to_json(channel_from_json(j));
  if (kind == "operator") return to_json(matrix_from_json(j));
  if (kind == "states") return states_json(states_from_json(j));
  if (kind == "pvm") return pvm_json(pvm_from_json(j));
  require_keys(j, {"effects"}, {"effects"}, "$");
  return effects_json(effects_from_json(j));
}

}  // namespace

RoundTrip io_roundtrip(const std::string& path) {
  const Json original = read_file(path);
  RoundTrip rt;
  rt.kind = detect_kind(original);
  rt.first = normalize(rt.kind, original);
  rt.second = normalize(rt.kind, parse(rt.first.dump()));
  rt.equal = rt.first == rt.second;
  rt.matches_input = rt.first == original;
  return rt;
}

}  // namespace broadcastlab::io
