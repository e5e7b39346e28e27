#pragma once

// JSON interchange for operators, channels and input files.

#include <string>
#include <vector>

#include "json.hpp"

#include "broadcastlab/channels.hpp"
#include "broadcastlab/contextuality.hpp"

namespace broadcastlab::io {

using Json = nlohmann::json;

/// Reads and parses a file; parse failures raise invalid_input.
Json read_file(const std::string& path);
Json parse(const std::string& text);
/// Deterministic text: sorted keys, two-space indent, shortest round-trip doubles.
std::string dump(const Json& j);

/// {"dim_row", "dim_col", "entries": [[re, im], ...]} in row-major order.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path = "$");

Json to_json(const KrausChannel& ch);
Json to_json(const ChoiMatrix& ch);
Json to_json(const MeasurePrepareChannel& ch);
Json to_json(const Channel& ch);
/// {"kind": "kraus" | "choi" | "measure_prepare", "d_in", "d_out", payload}.
Channel channel_from_json(const Json& j, const std::string& path = "$");

DensityOperator state_from_json(const Json& j, const std::string& path);
Effect effect_from_json(const Json& j, const std::string& path);

/// {"states": [operator, ...]}
std::vector<DensityOperator> states_from_json(const Json& j);
/// {"effects": [operator, ...]}
std::vector<Matrix> effects_from_json(const Json& j);

struct PvmInput {
  std::vector<LabeledProjection> outcomes;
  std::vector<std::vector<std::string>> subsets;
};
/// {"outcomes": [{"label", "projection"}], "subsets": [[label, ...], ...]}
PvmInput pvm_from_json(const Json& j);

/// Rejects keys outside `allowed`, naming the offending field.
void require_keys(const Json& j, const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required, const std::string& path);

struct RoundTrip {
  std::string kind;  // operator | channel | states | effects | pvm
  Json first;        // serialization of the parsed object
  Json second;       // serialization after parsing `first` again
  bool equal = false;          // first == second
  bool matches_input = false;  // first == the file as read
};

/// Parses a file by shape, re-serializes it and parses the result again.
RoundTrip io_roundtrip(const std::string& path);

}  // namespace broadcastlab::io
