#include "shapeot/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace shapeot::io {
namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be numeric");
  return j.get<double>();
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) parse_error(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      parse_error(std::string(what) + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = number(j[i][c], what);
  }
  return m;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

// Measure construction errors inside a parser are parse errors.
template <typename F>
auto as_parse_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::SkewnessViolation) throw;
    parse_error(e.what());
  }
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const DiscreteMeasure& mu) {
  return Json{{"points", matrix_to_json(mu.points())}, {"weights", vector_to_json(mu.weights())}};
}

DiscreteMeasure measure_from_json(const Json& j) {
  return as_parse_error([&] {
    Matrix pts = matrix_from_json(field(j, "points"), "points");
    Vector w = vector_from_json(field(j, "weights"), "weights");
    return make_measure(std::move(pts), std::move(w));
  });
}

std::string measure_to_csv(const DiscreteMeasure& mu) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index d = 0; d < mu.dim(); ++d) out << 'x' << (d + 1) << ',';
  out << "w\n";
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    for (Eigen::Index d = 0; d < mu.dim(); ++d) out << mu.points()(k, d) << ',';
    out << mu.weight(k) << '\n';
  }
  return out.str();
}

DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_error("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2) parse_error("CSV header must be x1,...,xn,w");
  const std::size_t n = header.size() - 1;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  for (std::size_t d = 0; d < n; ++d)
    if (trim(header[d]) != "x" + std::to_string(d + 1)) parse_error("CSV header must be x1,...,xn,w");
  if (trim(header[n]) != "w") parse_error("CSV header must end with w");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const std::string t = trim(cell);
        row.push_back(std::stod(t, &used));
        if (used != t.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        parse_error("line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != n + 1)
      parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(n + 1) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_error("CSV has no atoms");
  Matrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  Vector w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t d = 0; d < n; ++d)
      pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)) = rows[k][d];
    w(static_cast<Eigen::Index>(k)) = rows[k][n];
  }
  return as_parse_error([&] { return make_measure(std::move(pts), std::move(w)); });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
  try {
    if (path.extension() == ".csv") {
      std::ifstream in(path);
      if (!in) parse_error("cannot open " + path.string());
      std::stringstream buf;
      buf << in.rdbuf();
      return measure_from_csv(buf.str());
    }
    return measure_from_json(read_json_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    const std::string msg = e.what();
    if (msg.find(path.string()) != std::string::npos) throw;
    parse_error(path.string() + ": " + msg);
  }
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu) {
  if (path.extension() == ".csv")
    write_text_file(path, measure_to_csv(mu));
  else
    write_text_file(path, dump(to_json(mu)));
}

Json to_json(const CurveSample& curve) {
  Json ms = Json::array();
  for (const auto& m : curve.measures()) ms.push_back(to_json(m));
  return Json{{"times", curve.times()}, {"measures", std::move(ms)}};
}

CurveSample curve_from_json(const Json& j) {
  const auto& times = field(j, "times");
  const auto& measures = field(j, "measures");
  if (!times.is_array() || !measures.is_array()) parse_error("curve fields must be arrays");
  std::vector<double> ts;
  for (const auto& t : times) ts.push_back(number(t, "times"));
  std::vector<DiscreteMeasure> ms;
  for (const auto& m : measures) ms.push_back(measure_from_json(m));
  return as_parse_error([&] { return CurveSample(std::move(ts), std::move(ms)); });
}

Json to_json(const Isometry& g) {
  return Json{{"R", matrix_to_json(g.rotation())}, {"t", vector_to_json(g.translation())}};
}

Isometry isometry_from_json(const Json& j) {
  return as_parse_error([&] {
    return Isometry(matrix_from_json(field(j, "R"), "R"), vector_from_json(field(j, "t"), "t"));
  });
}

Json to_json(const IsoAlgebraElement& x) {
  return Json{{"A", matrix_to_json(x.skew())}, {"a", vector_to_json(x.drift())}};
}

IsoAlgebraElement algebra_from_json(const Json& j) {
  return as_parse_error([&] {
    return IsoAlgebraElement(matrix_from_json(field(j, "A"), "A"),
                             vector_from_json(field(j, "a"), "a"));
  });
}

Json to_json(const Coupling& coupling) {
  Json entries = Json::array();
  for (const auto& e : coupling.nonzeros()) entries.push_back(Json::array({e.row, e.col, e.weight}));
  return Json{{"rows", coupling.rows()}, {"cols", coupling.cols()}, {"entries", std::move(entries)}};
}

Json to_json(const TransportResult& result) {
  return Json{{"distance", result.distance},
              {"cost", result.cost},
              {"solver", std::string(to_string(result.solver))},
              {"iterations", result.iterations},
              {"marginal_residual", result.coupling.marginal_residual()}};
}

Json to_json(const ShapeDistanceResult& result) {
  Json j{{"distance", result.distance},
         {"minimizer", to_json(result.minimizer)},
         {"restarts_used", result.restarts_used},
         {"inner_iterations", result.inner_iterations},
         {"converged", result.converged}};
  j["certificate"] = result.certificate ? Json(*result.certificate) : Json(nullptr);
  return j;
}

Json to_json(const QuotientCoefficientReport& report) {
  Json grid = Json::array();
  for (const auto& e : report.grid)
    grid.push_back(Json{{"t", e.t},
                        {"s", e.s},
                        {"W", e.w_value},
                        {"D", e.d_value},
                        {"C", number_or_null(e.coefficient)},
                        {"defined", e.defined}});
  Json undefined = Json::array();
  for (const auto& [t, s] : report.undefined_pairs) undefined.push_back(Json::array({t, s}));
  return Json{{"grid", std::move(grid)},
              {"max_relative_spread", report.max_relative_spread},
              {"undefined_pairs", std::move(undefined)},
              {"verdict", std::string(to_string(report.verdict))},
              {"certified", report.certified}};
}

Json to_json(const OrbitSubspaceReport& report) {
  Json kernel = Json::array();
  for (const auto& x : report.kernel_basis) kernel.push_back(to_json(x));
  return Json{{"atoms", report.measure.size()},
              {"dimension", report.measure.dim()},
              {"rank", report.rank},
              {"tangent_dim", report.tangent_dim},
              {"shape_tangent_dim", report.shape_tangent_dim},
              {"iso_dim", iso_dimension(report.measure.dim())},
              {"rank_rel_tol", report.rank_rel_tol},
              {"singular_values", vector_to_json(report.singular_values)},
              {"kernel", std::move(kernel)}};
}

std::string evaluation_matrix_csv(const OrbitSubspaceReport& report) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto& e = report.evaluation_matrix;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) out << (j ? "," : "") << e(i, j);
    out << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace shapeot::io
