// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "shapeot/io.hpp"

using namespace shapeot;
namespace fx = shapeot::fixtures;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

IsoAlgebraElement random_element(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector c(iso_dimension(n));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return from_coordinates(c, n);
}

constexpr std::size_t kOracleGrid = 720;

// 1. exact solver against the permutation oracle
Outcome ot_exactness() {
  double worst = 0.0;
  int count = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index m = 2 + i % 7;
    const Eigen::Index n = 1 + (i / 7) % 3;
    const double p = (i / 21) % 2 ? 2.0 : 1.0;
    const auto mu = fx::random_uniform_measure(1000 + 2 * i, m, n);
    const auto nu = fx::random_uniform_measure(1001 + 2 * i, m, n);
    const double a = wasserstein_exact(mu, nu, p).cost;
    const double b = wasserstein_oracle(mu, nu, p).cost;
    worst = std::max(worst, std::abs(a - b) / std::max(b, 1e-300));
    ++count;
  }
  return {worst <= 1e-9, std::to_string(count) + " instances, max relative gap " + fmt(worst)};
}

// 2. metric axioms and group laws
Outcome metric_axioms() {
  double worst = 0.0;
  std::mt19937_64 rng(2000);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index n = 1 + i % 3;
    const double p = i % 3 == 0 ? 1.0 : (i % 3 == 1 ? 2.0 : 1.5);
    const auto a = fx::random_measure(2100 + 3 * i, 4 + i % 4, n);
    const auto b = fx::random_measure(2101 + 3 * i, 3 + i % 5, n);
    const auto c = fx::random_measure(2102 + 3 * i, 5, n);
    const double ab = wasserstein_exact(a, b, p).distance;
    const double ba = wasserstein_exact(b, a, p).distance;
    const double ac = wasserstein_exact(a, c, p).distance;
    const double bc = wasserstein_exact(b, c, p).distance;
    worst = std::max({worst, std::abs(ab - ba), ac - ab - bc});

    const auto g = random_isometry(n, rng(), OrthogonalComponent::either, 3.0);
    const double moved = wasserstein_exact(pushforward(a, g), b, p).distance;
    const double adjoint = wasserstein_exact(a, pushforward(b, inverse(g)), p).distance;
    const double both = wasserstein_exact(pushforward(a, g), pushforward(b, g), p).distance;
    worst = std::max({worst, std::abs(moved - adjoint), std::abs(both - ab)});
  }
  return {worst <= 1e-9, "100 triples and motions, max violation " + fmt(worst)};
}

// 3. shape distance recovers orbit pairs
Outcome shape_recovery() {
  double worst_solver = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index n = 2 + i % 2;
    const Eigen::Index m = 3 + i % 18;
    const auto component = (i / 2) % 2 ? OrthogonalComponent::improper
                                       : OrthogonalComponent::proper;
    const auto pair = fx::orbit_pair(3000 + i, m, n, component);
    worst_solver = std::max(worst_solver, shape_distance(pair.mu, pair.nu).distance);
    if (n == 2)
      worst_oracle = std::max(worst_oracle,
                              shape_distance_oracle_2d(pair.mu, pair.nu, kOracleGrid).distance);
  }
  return {worst_solver <= 1e-6 && worst_oracle <= 1e-7,
          "100 pairs, max solver distance " + fmt(worst_solver) + ", max 2D oracle distance " +
              fmt(worst_oracle)};
}

// 4. alternating solver against the oracle
Outcome oracle_dominance() {
  int above = 0;
  double lowest = 0.0;
  std::ostringstream log;
  for (int i = 0; i < 50; ++i) {
    const auto mu = fx::random_measure(4000 + 2 * i, 4 + i % 6, 2);
    const auto nu = fx::random_measure(4001 + 2 * i, 4 + (i + 3) % 6, 2);
    const double solver = shape_distance(mu, nu).distance;
    const double oracle = shape_distance_oracle_2d(mu, nu, kOracleGrid).distance;
    const double gap = solver - oracle;
    lowest = std::min(lowest, gap);
    if (gap > 0.05 * oracle) {
      ++above;
      log << " [local minimum: instance " << i << ", solver " << fmt(solver) << ", oracle "
          << fmt(oracle) << "]";
    }
  }
  const bool pass = lowest >= -1e-7 && above * 10 < 50;
  return {pass, "50 pairs, min gap " + fmt(lowest) + ", " + std::to_string(above) +
                    " above 5% of the oracle" + log.str()};
}

// 5. triangle inequality on certified shape distances
Outcome shape_triangle() {
  double worst = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const auto a = fx::random_measure(5000 + 3 * i, 4, 2);
    const auto b = fx::random_measure(5001 + 3 * i, 5, 2);
    const auto c = fx::random_measure(5002 + 3 * i, 4, 2);
    const double ab = shape_distance_oracle_2d(a, b, kOracleGrid).distance;
    const double bc = shape_distance_oracle_2d(b, c, kOracleGrid).distance;
    const double ac = shape_distance_oracle_2d(a, c, kOracleGrid).distance;
    worst = std::max(worst, ac - ab - bc);
  }
  return {worst <= 1e-6, "50 triples, max D(a,c) - D(a,b) - D(b,c) = " + fmt(worst)};
}

// 6. geodesic law and the mixing counterexample
Outcome geodesic_law() {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 1 + i % 3;
    const auto mu = fx::random_measure(6000 + 2 * i, 3 + i % 5, n);
    const auto nu = fx::random_measure(6001 + 2 * i, 3 + (i + 2) % 5, n);
    worst = std::max(worst, constant_speed_check(geodesic_between(mu, nu, 6)));
  }
  const double mixing = constant_speed_check(fx::mass_mixing(101));
  return {worst <= 1e-7 && mixing > 0.1, "50 curves, max deviation " + fmt(worst) +
                                             "; mass mixing deviation " + fmt(mixing)};
}

// 7. quotient coefficients on aligned and branched curves
Outcome quotient_coefficients_law() {
  ShapeSolverConfig certified;
  certified.oracle_grid_steps = 360;
  int geodesic = 0;
  double spread = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto curve = fx::aligned_geodesic(7000 + 2 * i, 3 + i % 3, 4, 360);
    const auto report = quotient_coefficients(curve, certified);
    if (report.verdict == shapeot::Verdict::geodesic_in_shape_space) ++geodesic;
    spread = std::max(spread, report.max_relative_spread);
  }
  double class_gap = 0.0, w_dev = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const auto b = fx::branch(7100 + 2 * i, 4, 9);
    for (std::size_t k = 0; k < b.base.size(); ++k)
      class_gap = std::max(class_gap, shape_distance_oracle_2d(b.branched.measures()[k],
                                                               b.base.measures()[k], 360)
                                          .distance);
    w_dev = std::min(w_dev, constant_speed_check(b.branched));
  }
  const bool pass = geodesic == 20 && spread <= 1e-4 && class_gap <= 1e-7 && w_dev > 1e-2;
  return {pass, std::to_string(geodesic) + "/20 aligned curves geodesic, max spread " +
                    fmt(spread) + "; branch curves: max class gap " + fmt(class_gap) +
                    ", min W deviation " + fmt(w_dev)};
}

// 8. Dirac tangent example through the CLI
Outcome dirac_tangent() {
  const auto path = std::filesystem::temp_directory_path() / "shapeot_acceptance_dirac.json";
  io::write_measure(path, dirac((Vector(3) << 0.3, -1.2, 2.0).finished()));
  std::ostringstream out, err;
  const int code = cli::run({"tangent", path.string()}, out, err);
  if (code != 0) return {false, "tangent exited with " + std::to_string(code) + ": " + err.str()};
  const auto j = io::Json::parse(out.str());
  const int rank = j["rank"], dim = j["shape_tangent_dim"], kernel = j["kernel_dim"];
  return {rank == 3 && dim == 0 && kernel == 3,
          "rank " + std::to_string(rank) + ", shape_tangent_dim " + std::to_string(dim) +
              ", kernel dimension " + std::to_string(kernel)};
}

// 9. Killing flow invariants
Outcome killing_flows() {
  std::mt19937_64 rng(9000);
  std::normal_distribution<double> normal;
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const std::vector<double> steps{0.04, 0.02, 0.01};
  double worst_norm = 0.0, worst_slope = 0.0, min_slope = INFINITY, max_slope = -INFINITY;
  for (int i = 0; i < 30; ++i) {
    const Eigen::Index n = 1 + i % 3;
    const auto mu = fx::random_measure(9100 + i, 5, n);
    const auto x = random_element(rng, n);
    Vector center(n);
    for (Eigen::Index d = 0; d < n; ++d) center(d) = 0.5 * normal(rng);
    const auto phi = TestFunction::gaussian(center, 1.0 + 0.5 * (i % 3));
    worst_norm = std::max(worst_norm, flow_norm_invariance(mu, x, grid));
    // Least-squares slope of log residual against log step.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const double h : steps) {
      const double lx = std::log(h), ly = std::log(continuity_residual(mu, x, phi, grid, h));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double k = static_cast<double>(steps.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    min_slope = std::min(min_slope, slope);
    max_slope = std::max(max_slope, slope);
    worst_slope = std::max(worst_slope, std::abs(slope - 2.0));
  }
  return {worst_norm <= 1e-10 && worst_slope <= 0.2,
          "30 fixtures, max norm deviation " + fmt(worst_norm) + ", slopes in [" +
              fmt(min_slope) + ", " + fmt(max_slope) + "]"};
}

// 10. representative independence
Outcome independence() {
  double worst = 0.0;
  int mismatched = 0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 1 + i % 3;
    const auto mu = fx::random_measure(10000 + i, 1 + i % 6, n);
    const auto g = random_isometry(n, 10100 + static_cast<std::uint64_t>(i),
                                   OrthogonalComponent::either, 3.0);
    const auto check = representative_independence_check(mu, g, 10200 + static_cast<std::uint64_t>(i));
    worst = std::max(worst, check.discrepancy);
    if (check.rank_mu != check.rank_gmu || check.shape_dim_mu != check.shape_dim_gmu)
      ++mismatched;
  }
  return {worst <= 1e-9 && mismatched == 0, "50 pairs, max discrepancy " + fmt(worst) + ", " +
                                                std::to_string(mismatched) +
                                                " rank or dimension mismatches"};
}

// 11. dim iso(n)
Outcome iso_dimension_audit() {
  int bad = 0;
  std::ostringstream detail;
  for (Eigen::Index n = 2; n <= 4; ++n) {
    for (int i = 0; i < 20; ++i) {
      const auto mu = fx::random_measure(11000 + 100 * n + i, n + 1 + i % 3, n);
      if (orbit_subspace(mu).rank != iso_dimension(n)) ++bad;
      const auto single = fx::random_measure(11500 + 100 * n + i, 1, n);
      if (orbit_subspace(single).rank != n) ++bad;
    }
    detail << "n=" << n << " rank " << iso_dimension(n) << "; ";
  }
  return {bad == 0, "60 generic and 60 single-atom configurations (" + detail.str() +
                        std::to_string(bad) + " wrong ranks)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"OT exactness", ot_exactness},
      {"metric axioms and group laws", metric_axioms},
      {"shape-distance recovery", shape_recovery},
      {"oracle dominance", oracle_dominance},
      {"shape pseudometric triangle", shape_triangle},
      {"geodesic law", geodesic_law},
      {"quotient coefficients", quotient_coefficients_law},
      {"Dirac tangent example", dirac_tangent},
      {"Killing-flow invariants", killing_flows},
      {"representative independence", independence},
      {"dim iso(n)", iso_dimension_audit},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::cout << "criterion " << (i + 1) << " [" << (v.pass ? "PASS" : "FAIL") << "] "
              << criteria[i].first << ": " << v.detail << " (" << fmt(secs) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
