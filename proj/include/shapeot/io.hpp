#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "shapeot/geodesic.hpp"
#include "shapeot/tangent.hpp"

namespace shapeot::io {

using Json = nlohmann::json;

// Parse failures (malformed text, wrong shapes, negative weights, zero mass)
// are reported as ParseError; skewness violations keep their own code.

// {"points": [[...], ...], "weights": [...]}
Json to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

// Header x1,...,xn,w then one atom per row.
std::string measure_to_csv(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_csv(const std::string& text);

// Dispatches on the extension (.csv, otherwise JSON).
DiscreteMeasure read_measure(const std::filesystem::path& path);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu);

// {"times": [...], "measures": [...]}
Json to_json(const CurveSample& curve);
CurveSample curve_from_json(const Json& j);

// {"R": [[...]], "t": [...]}
Json to_json(const Isometry& g);
Isometry isometry_from_json(const Json& j);

// {"A": [[...]], "a": [...]}
Json to_json(const IsoAlgebraElement& x);
IsoAlgebraElement algebra_from_json(const Json& j);

// {"rows": m, "cols": k, "entries": [[i, j, w], ...]} in row-major order.
Json to_json(const Coupling& coupling);

Json to_json(const TransportResult& result);
Json to_json(const ShapeDistanceResult& result);
Json to_json(const QuotientCoefficientReport& report);
Json to_json(const OrbitSubspaceReport& report);

std::string evaluation_matrix_csv(const OrbitSubspaceReport& report);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Serialization used for every file the tools write.
std::string dump(const Json& j);

}  // namespace shapeot::io
