#pragma once

#include "sublinear/bench.hpp"
#include "sublinear/core_model.hpp"
#include "sublinear/partition.hpp"
#include "sublinear/simgen.hpp"
#include "sublinear/sparse.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>

namespace sublinear::io {

using Json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Reads `y,x1,...,xp,block` CSV (block labels 1-based, covering 1..m).
/// Throws SchemaError carrying the offending line.
Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::string& path);

void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);

/// Block indices are written 1-based.
Json to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& j);

Json to_json(const SimulatedData& sim);
Json to_json(const BenchmarkReport& report);
Json to_json(const CvCurve& curve);
Json to_json(const BlockIdentification& id);
Json to_json(const NormalityDiagnostics& diag);

/// Sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// `key = value` lines; '#' starts a comment; blank lines are ignored.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config(const std::string& path);

}  // namespace sublinear::io
