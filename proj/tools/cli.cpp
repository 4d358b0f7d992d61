#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fixtures.hpp"
#include "shapeot/io.hpp"

namespace shapeot::cli {
namespace {

using io::Json;

struct Options {
  double p = 2.0;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  double rel_tol = 1e-9;
  std::size_t oracle_2d = 0;
  std::string format = "json";
  std::string output;
  std::string coupling;
  bool checks = false;

  // subcommand arguments
  std::string first, second;
  std::size_t samples = 5;
  std::vector<double> times;
  bool align = false;
  std::string curve_out;
  double tolerance = 1e-4;
  double rank_tol = 1e-8;
  std::string matrix_out;
  double flow_t = 1.0;
  std::string measure_out;
};

// Error raised by the tool itself with an explicit exit code.
struct Failure {
  int code;
  std::string message;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return kParse;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DimensionNot2:
    case ErrorCode::MeasureMismatch:
      return kDimension;
    case ErrorCode::SkewnessViolation:
    case ErrorCode::NotOrthogonal:
      return kAlgebra;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::TOutOfRange:
    case ErrorCode::BadStep:
    case ErrorCode::BadSwitchFunction:
      return kUsage;
    default:
      return kSolver;
  }
}

void require_same_dim(const DiscreteMeasure& a, const std::string& path_a,
                      const DiscreteMeasure& b, const std::string& path_b) {
  if (a.dim() != b.dim())
    throw Failure{kDimension, path_a + " is " + std::to_string(a.dim()) + "-dimensional but " +
                                  path_b + " is " + std::to_string(b.dim()) + "-dimensional"};
}

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Failure{kUnsupportedP, "p must be a finite number >= 1"};
}

ShapeSolverConfig shape_config(const Options& o) {
  ShapeSolverConfig c;
  c.p = 2.0;
  c.restarts = o.restarts;
  c.seed = o.seed;
  c.rel_tol = o.rel_tol;
  if (o.epsilon) {
    c.inner_solver = InnerSolver::entropic_then_exact;
    c.entropic_epsilon = *o.epsilon;
  }
  c.oracle_grid_steps = o.oracle_2d;
  return c;
}

std::optional<double> speed_deviation(const CurveSample& curve) {
  try {
    return constant_speed_check(curve);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateEndpoints) throw;
    return std::nullopt;
  }
}

// ---- table rendering -------------------------------------------------------

std::string scalar_text(const Json& j) {
  if (j.is_null()) return "-";
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(6) << j.get<double>();
    return s.str();
  }
  return j.dump();
}

bool all_scalars(const Json& arr) {
  return std::all_of(arr.begin(), arr.end(), [](const Json& x) { return x.is_primitive(); });
}

bool uniform_rows(const Json& arr) {
  if (arr.empty() || !arr[0].is_object()) return false;
  for (const auto& row : arr) {
    if (!row.is_object() || row.size() != arr[0].size()) return false;
    for (const auto& [k, v] : row.items())
      if (!arr[0].contains(k) || !v.is_primitive()) return false;
  }
  return true;
}

void render(const Json& j, const std::string& prefix, std::ostream& out);

void render_rows(const Json& arr, const std::string& title, std::ostream& out) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : arr[0].items()) keys.push_back(k);
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const auto& k : keys) width.push_back(k.size());
  for (const auto& row : arr) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < keys.size(); ++c) {
      line.push_back(scalar_text(row.at(keys[c])));
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  out << title << ":\n";
  auto emit = [&](const std::vector<std::string>& line) {
    out << ' ';
    for (std::size_t c = 0; c < line.size(); ++c)
      out << ' ' << std::setw(static_cast<int>(width[c])) << line[c];
    out << '\n';
  };
  emit(keys);
  for (const auto& line : cells) emit(line);
}

void render(const Json& j, const std::string& prefix, std::ostream& out) {
  if (!j.is_object()) {
    out << prefix << ": " << scalar_text(j) << '\n';
    return;
  }
  std::size_t pad = 0;
  for (const auto& [k, v] : j.items()) pad = std::max(pad, prefix.size() + k.size() + 1);
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_primitive()) {
      out << std::left << std::setw(static_cast<int>(pad)) << key << std::right << "  "
          << scalar_text(v) << '\n';
    } else if (v.is_array() && all_scalars(v)) {
      out << std::left << std::setw(static_cast<int>(pad)) << key << std::right << " ";
      for (const auto& x : v) out << ' ' << scalar_text(x);
      out << '\n';
    } else if (v.is_array() && uniform_rows(v)) {
      render_rows(v, key, out);
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& item = v[i];
        const std::string sub = key + "[" + std::to_string(i) + "]";
        if (item.is_array() && all_scalars(item)) {
          out << sub << ' ';
          for (const auto& x : item) out << ' ' << scalar_text(x);
          out << '\n';
        } else {
          render(item, sub, out);
        }
      }
    } else {
      render(v, key, out);
    }
  }
}

void emit(const Json& result, const Options& o, std::ostream& out) {
  std::string text;
  if (o.format == "table") {
    std::ostringstream s;
    render(result, "", s);
    text = s.str();
  } else {
    text = io::dump(result);
  }
  if (o.output.empty())
    out << text;
  else
    io::write_text_file(o.output, text);
}

// ---- subcommands -----------------------------------------------------------

Json cmd_dist(const Options& o) {
  require_p(o.p);
  const auto mu = io::read_measure(o.first);
  const auto nu = io::read_measure(o.second);
  require_same_dim(mu, o.first, nu, o.second);
  TransportResult r = [&] {
    if (!o.epsilon) return wasserstein_exact(mu, nu, o.p);
    EntropicOptions e;
    e.epsilon = *o.epsilon;
    return wasserstein_entropic(mu, nu, o.p, e);
  }();
  if (!o.coupling.empty()) io::write_text_file(o.coupling, io::dump(io::to_json(r.coupling)));
  Json j = io::to_json(r);
  j["p"] = o.p;
  return j;
}

Json cmd_shape_dist(const Options& o) {
  require_p(o.p);
  const auto mu = io::read_measure(o.first);
  const auto nu = io::read_measure(o.second);
  require_same_dim(mu, o.first, nu, o.second);
  ShapeDistanceResult r = [&] {
    if (o.oracle_2d > 0) return shape_distance_oracle_2d(mu, nu, o.oracle_2d, o.p);
    if (o.p != 2.0)
      throw Failure{kUnsupportedP,
                    "the alternating solver supports p = 2 only; use --oracle-2d N in the plane"};
    auto config = shape_config(o);
    config.oracle_grid_steps = 0;
    return shape_distance(mu, nu, config);
  }();
  if (!o.coupling.empty()) io::write_text_file(o.coupling, io::dump(io::to_json(r.coupling)));
  Json j = io::to_json(r);
  j["p"] = o.p;
  j["solver"] = o.oracle_2d > 0 ? "oracle-2d" : "alternating";
  j["wasserstein"] = wasserstein_exact(mu, nu, o.p).distance;
  return j;
}

Json cmd_geodesic(const Options& o) {
  const auto mu = io::read_measure(o.first);
  auto nu = io::read_measure(o.second);
  require_same_dim(mu, o.first, nu, o.second);
  Json alignment = nullptr;
  if (o.align) {
    // Replace nu by g*^-1 # nu so that W(mu, nu) = D([mu], [nu]).
    const Isometry g = o.oracle_2d > 0 && mu.dim() == 2
                           ? shape_distance_oracle_2d(mu, nu, o.oracle_2d).minimizer
                           : shape_distance(mu, nu, [&] {
                               auto c = shape_config(o);
                               c.oracle_grid_steps = 0;
                               return c;
                             }()).minimizer;
    const auto back = inverse(g);
    nu = pushforward(nu, back);
    alignment = io::to_json(back);
  }
  if (!o.times.empty() && o.samples != 5)
    throw Failure{kUsage, "--samples and --times are mutually exclusive"};
  const auto curve =
      o.times.empty() ? geodesic_between(mu, nu, o.samples) : geodesic_between(mu, nu, o.times);
  const auto deviation = speed_deviation(curve);

  Json j{{"samples", curve.size()},
         {"times", curve.times()},
         {"aligned", o.align},
         {"alignment", alignment},
         {"endpoint_distance", wasserstein_exact(mu, nu, 2.0).distance},
         {"constant_speed_deviation", deviation ? Json(*deviation) : Json(nullptr)},
         {"degenerate", !deviation.has_value()}};
  if (o.curve_out.empty())
    j["curve"] = io::to_json(curve);
  else
    io::write_text_file(o.curve_out, io::dump(io::to_json(curve)));
  return j;
}

Json cmd_quotient(const Options& o) {
  const auto curve = io::curve_from_json(io::read_json_file(o.first));
  QuotientOptions q;
  q.relative_tolerance = o.tolerance;
  const auto report = quotient_coefficients(curve, shape_config(o), q);
  Json j = io::to_json(report);
  const auto deviation = speed_deviation(curve);
  j["w_constant_speed_deviation"] = deviation ? Json(*deviation) : Json(nullptr);
  double max_d = 0.0;
  for (const auto& e : report.grid) max_d = std::max(max_d, e.d_value);
  j["max_shape_distance"] = max_d;
  return j;
}

Json cmd_tangent(const Options& o) {
  const auto mu = io::read_measure(o.first);
  const auto report = orbit_subspace(mu, o.rank_tol);
  if (!o.matrix_out.empty()) io::write_text_file(o.matrix_out, io::evaluation_matrix_csv(report));
  Json j = io::to_json(report);
  j["kernel_dim"] = report.kernel_basis.size();
  return j;
}

Json cmd_flow(const Options& o) {
  const auto mu = io::read_measure(o.first);
  const auto x = io::algebra_from_json(io::read_json_file(o.second));
  if (x.dim() != mu.dim())
    throw Failure{kDimension, o.second + " acts on R^" + std::to_string(x.dim()) + " but " +
                                  o.first + " lives in R^" + std::to_string(mu.dim())};
  const auto moved = flow_pushforward(mu, x, o.flow_t);
  Json j{{"t", o.flow_t}, {"flow", io::to_json(group_exponential(x, -o.flow_t))}};
  if (o.measure_out.empty())
    j["measure"] = io::to_json(moved);
  else
    io::write_measure(o.measure_out, moved);

  if (o.checks) {
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    // Gaussian bump centred on the barycenter with width set by the spread.
    const double spread = std::sqrt(second_moment(mu, barycenter(mu)));
    const auto phi = TestFunction::gaussian(barycenter(mu), std::max(1.0, spread));
    const double h = 1e-3;
    j["checks"] = Json{{"continuity_residual", continuity_residual(mu, x, phi, grid, h)},
                       {"continuity_residual_half_step",
                        continuity_residual(mu, x, phi, grid, h / 2)},
                       {"fd_step", h},
                       {"norm_invariance", flow_norm_invariance(mu, x, grid)},
                       {"l2_norm", DiscreteVectorField::fundamental(mu, x).norm()},
                       {"l1_in_time_norm", l1_in_time_norm(mu, x, 16)}};
  }
  return j;
}

Json cmd_fixtures(const Options& o) {
  const auto names = fixtures::write_corpus(o.first, o.seed);
  return Json{{"directory", o.first}, {"seed", o.seed}, {"files", names}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Optimal transport and shape distances between discrete measures", "shapeot"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--p", o.p, "transport exponent p >= 1");
  app.add_option("--restarts", o.restarts, "alternating solver restarts")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "seed for restarts and fixtures");
  app.add_option("--epsilon", o.epsilon, "entropic regularization (enables Sinkhorn)")
      ->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", o.rel_tol, "relative stopping tolerance")->check(CLI::PositiveNumber);
  app.add_option("--oracle-2d", o.oracle_2d, "use the planar grid oracle with N angles");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--output", o.output, "write the result here instead of stdout");

  auto* dist = app.add_subcommand("dist", "Wasserstein distance W_p(mu, nu)");
  dist->add_option("mu", o.first)->required();
  dist->add_option("nu", o.second)->required();
  dist->add_option("--coupling", o.coupling, "write the optimal plan as JSON");

  auto* shape = app.add_subcommand("shape-dist", "shape distance D_p([mu], [nu])");
  shape->add_option("mu", o.first)->required();
  shape->add_option("nu", o.second)->required();
  shape->add_option("--coupling", o.coupling, "write the plan between g#mu and nu");

  auto* geo = app.add_subcommand("geodesic", "displacement interpolation from mu to nu");
  geo->add_option("mu", o.first)->required();
  geo->add_option("nu", o.second)->required();
  geo->add_option("--samples", o.samples, "equispaced samples")->check(CLI::Range(2, 1000000));
  geo->add_option("--times", o.times, "explicit sample times in [0, 1]");
  geo->add_flag("--align", o.align, "move nu onto its best rigid position first");
  geo->add_option("--curve", o.curve_out, "write the curve JSON here");

  auto* quot = app.add_subcommand("quotient", "quotient coefficients C_ts = W / D of a curve");
  quot->add_option("curve", o.first)->required();
  quot->add_option("--tolerance", o.tolerance, "relative spread tolerance")
      ->check(CLI::PositiveNumber);

  auto* tan = app.add_subcommand("tangent", "orbit subspace and shape tangent dimension");
  tan->add_option("mu", o.first)->required();
  tan->add_option("--rank-tol", o.rank_tol, "relative singular value threshold")
      ->check(CLI::PositiveNumber);
  tan->add_option("--matrix", o.matrix_out, "write the evaluation matrix as CSV");

  auto* flow = app.add_subcommand("flow", "push mu along exp(-tX)");
  flow->add_option("mu", o.first)->required();
  flow->add_option("algebra", o.second)->required();
  flow->add_option("--t", o.flow_t, "flow time");
  flow->add_flag("--checks", o.checks, "continuity and norm-invariance diagnostics");
  flow->add_option("--measure-out", o.measure_out, "write mu_t here");

  auto* fix = app.add_subcommand("fixtures", "write the seeded fixture corpus");
  fix->add_option("dir", o.first)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "shapeot: " << e.what() << '\n';
    return kUsage;
  }

  try {
    Json result;
    if (dist->parsed())
      result = cmd_dist(o);
    else if (shape->parsed())
      result = cmd_shape_dist(o);
    else if (geo->parsed())
      result = cmd_geodesic(o);
    else if (quot->parsed())
      result = cmd_quotient(o);
    else if (tan->parsed())
      result = cmd_tangent(o);
    else if (flow->parsed())
      result = cmd_flow(o);
    else
      result = cmd_fixtures(o);
    emit(result, o, out);
    return kOk;
  } catch (const Failure& f) {
    err << "shapeot: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "shapeot: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "shapeot: " << e.what() << '\n';
    return kSolver;
  }
}

}  // namespace shapeot::cli
