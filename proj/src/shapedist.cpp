#include "shapeot/shapedist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace shapeot {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TransportResult inner_transport(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                InnerSolver solver, double epsilon) {
  if (solver == InnerSolver::exact) return wasserstein_exact(a, b, 2.0);
  EntropicOptions opts;
  opts.epsilon = epsilon;
  opts.max_iter = 2000;
  opts.marginal_tol = 1e-9;
  try {
    return wasserstein_entropic(a, b, 2.0, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalUnderflow) throw;
    return wasserstein_exact(a, b, 2.0);
  }
}

// Initial rotations from principal axes: E_nu S E_mu^T for every sign
// pattern S (at most 16).
std::vector<Matrix> principal_axes_starts(const DiscreteMeasure& mu_c,
                                          const DiscreteMeasure& nu_c) {
  const auto n = mu_c.dim();
  auto axes = [](const DiscreteMeasure& m) {
    const Matrix cov = m.points().transpose() * m.weights().asDiagonal() * m.points();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    return Matrix(eig.eigenvectors());
  };
  const Matrix em = axes(mu_c);
  const Matrix en = axes(nu_c);
  std::vector<Matrix> starts;
  const std::uint64_t combos = n >= 4 ? 16 : (std::uint64_t{1} << n);
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    Vector signs = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n && i < 64; ++i)
      if (mask & (std::uint64_t{1} << i)) signs(i) = -1.0;
    starts.push_back(en * signs.asDiagonal() * em.transpose());
  }
  return starts;
}

struct RunOutcome {
  Matrix rotation;
  double objective;  // W_2^2 between centered measures
  std::size_t iterations;
  bool converged;
};

RunOutcome run_alternation(const DiscreteMeasure& mu_c, const DiscreteMeasure& nu_c,
                           Matrix start, const ShapeSolverConfig& config) {
  const auto n = mu_c.dim();
  Isometry g(std::move(start), Vector::Zero(n));
  RunOutcome best{g.rotation(), std::numeric_limits<double>::infinity(), 0, false};
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < config.max_alternations; ++it) {
    const auto moved = pushforward(mu_c, g);
    const auto plan = inner_transport(moved, nu_c, config.inner_solver, config.entropic_epsilon);
    ++best.iterations;
    const double objective = plan.cost;
    if (objective < best.objective) {
      best.objective = objective;
      best.rotation = g.rotation();
    }
    if (objective <= 0.0 ||
        (std::isfinite(previous) && previous - objective <= config.rel_tol * previous)) {
      best.converged = true;
      break;
    }
    previous = objective;
    g = Isometry(weighted_procrustes(mu_c, nu_c, plan.coupling), Vector::Zero(n));
  }
  if (config.inner_solver != InnerSolver::exact) {
    best.objective = wasserstein_exact(pushforward(mu_c, Isometry(best.rotation, Vector::Zero(n))),
                                       nu_c, 2.0)
                         .cost;
  }
  return best;
}

ShapeDistanceResult finalize(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const Isometry& g, double p, std::size_t restarts,
                             std::size_t iterations, bool converged) {
  const auto moved = pushforward(mu, g);
  auto plan = wasserstein_exact(moved, nu, p);
  return ShapeDistanceResult{plan.distance, g,           std::move(plan.coupling), restarts,
                             iterations,    converged,   std::nullopt};
}

}  // namespace

void ShapeSolverConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::ConfigInvalid, "p must be >= 1");
  if (restarts < 1) throw Error(ErrorCode::ConfigInvalid, "restarts must be >= 1");
  if (max_alternations < 1) throw Error(ErrorCode::ConfigInvalid, "max_alternations must be >= 1");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "rel_tol must be positive");
  if (inner_solver == InnerSolver::entropic_then_exact && !(entropic_epsilon > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "entropic_epsilon must be positive");
}

Matrix planar_orthogonal(double theta, bool improper) {
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix r(2, 2);
  if (improper)
    r << c, s, s, -c;
  else
    r << c, -s, s, c;
  return r;
}

Matrix weighted_procrustes(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const Coupling& plan) {
  const auto n = mu.dim();
  Matrix cross = Matrix::Zero(n, n);
  for (const auto& e : plan.nonzeros())
    cross.noalias() += e.weight * nu.points().row(e.col).transpose() * mu.points().row(e.row);
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

AlternationStep alternation_step(const DiscreteMeasure& mu_centered,
                                 const DiscreteMeasure& nu_centered, const Isometry& g,
                                 double p) {
  if (p != 2.0) throw Error(ErrorCode::ConfigInvalid, "alternation is exact only for p = 2");
  if (mu_centered.dim() != nu_centered.dim() || g.dim() != mu_centered.dim())
    throw Error(ErrorCode::DimensionMismatch, "alternation_step dimensions");
  auto plan = wasserstein_exact(pushforward(mu_centered, g), nu_centered, 2.0);
  Matrix r = weighted_procrustes(mu_centered, nu_centered, plan.coupling);
  const auto n = mu_centered.dim();
  return AlternationStep{Isometry(std::move(r), Vector::Zero(n)), std::move(plan)};
}

ShapeDistanceResult shape_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const ShapeSolverConfig& config) {
  config.validate();
  if (mu.dim() != nu.dim())
    throw Error(ErrorCode::DimensionMismatch, "shape distance between different dimensions");
  if (config.p != 2.0)
    throw Error(ErrorCode::ConfigInvalid,
                "the alternating solver supports p = 2 only; use the 2D oracle");
  const auto n = mu.dim();
  const Vector b_mu = barycenter(mu);
  const Vector b_nu = barycenter(nu);
  const auto mu_c = centered(mu);
  const auto nu_c = centered(nu);

  RunOutcome best{Matrix::Identity(n, n), std::numeric_limits<double>::infinity(), 0, false};
  std::size_t iterations = 0;
  std::size_t used = 0;
  auto consider = [&](const RunOutcome& run) {
    iterations += run.iterations;
    if (run.objective < best.objective) {
      best.rotation = run.rotation;
      best.objective = run.objective;
      best.converged = run.converged;
    }
  };

  for (std::size_t r = 0; r < config.restarts; ++r) {
    ++used;
    if (r == 0) {
      consider(run_alternation(mu_c, nu_c, Matrix::Identity(n, n), config));
    } else if (r == 1) {
      for (auto& start : principal_axes_starts(mu_c, nu_c))
        consider(run_alternation(mu_c, nu_c, std::move(start), config));
    } else {
      const auto component =
          r % 2 == 0 ? OrthogonalComponent::proper : OrthogonalComponent::improper;
      const auto g0 = random_isometry(n, splitmix64(config.seed ^ splitmix64(r)), component);
      consider(run_alternation(mu_c, nu_c, g0.rotation(), config));
    }
    if (best.objective <= 0.0) break;
  }

  const Isometry g(best.rotation, b_nu - best.rotation * b_mu);
  auto result = finalize(mu, nu, g, 2.0, used, iterations, best.converged);
  if (config.oracle_grid_steps > 0 && n == 2) {
    const auto oracle = shape_distance_oracle_2d(mu, nu, config.oracle_grid_steps, 2.0);
    result.certificate = result.distance - oracle.distance;
  }
  return result;
}

SearchRegion translation_search_region(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double p) {
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "search region dimensions");
  constexpr double eps = 0.25;
  const Vector center = 0.5 * (barycenter(mu) + barycenter(nu));
  auto mass_radius = [&](const DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> dist;
    for (Eigen::Index k = 0; k < m.size(); ++k)
      dist.emplace_back((m.atom(k) - center).norm(), m.weight(k));
    std::sort(dist.begin(), dist.end());
    double mass = 0.0;
    for (const auto& [d, w] : dist) {
      mass += w;
      if (mass >= 1.0 - eps) return d;
    }
    return dist.back().first;
  };
  const double inner = std::max(mass_radius(mu), mass_radius(nu));
  const double c = wasserstein_exact(mu, nu, p).cost;
  const double radius = inner + 0.5 * std::pow(c / (1.0 - 2.0 * eps), 1.0 / p);
  return SearchRegion{center, inner, radius};
}

double translation_search_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return translation_search_region(mu, nu, p).radius;
}

bool outside_search_region(const SearchRegion& region, const Isometry& g) {
  return (g.apply(region.center) - region.center).norm() > 2.0 * region.radius;
}

ShapeDistanceResult shape_distance_oracle_2d(const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu,
                                             std::size_t grid_steps, double p) {
  if (mu.dim() != 2 || nu.dim() != 2)
    throw Error(ErrorCode::DimensionNot2, "the grid oracle works in the plane only");
  if (grid_steps < 1) throw Error(ErrorCode::ConfigInvalid, "grid_steps must be >= 1");
  if (!(p >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "p must be >= 1");
  constexpr double kBudget = 2e8;
  const double work = 2.0 * static_cast<double>(grid_steps) * static_cast<double>(mu.size()) *
                      static_cast<double>(nu.size());
  if (work > kBudget)
    throw Error(ErrorCode::BudgetExceeded,
                "grid_steps * 2 * m * k = " + std::to_string(work) + " exceeds 2e8");

  const Vector b_mu = barycenter(mu);
  const Vector b_nu = barycenter(nu);
  const auto mu_c = centered(mu);
  const auto nu_c = centered(nu);
  std::size_t evaluations = 0;
  auto objective = [&](double theta, bool improper) {
    ++evaluations;
    const Isometry g(planar_orthogonal(theta, improper), Vector::Zero(2));
    return wasserstein_exact(pushforward(mu_c, g), nu_c, p).cost;
  };

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    double theta = 0.0;
    bool improper = false;
  } best;
  auto record = [&](double value, double theta, bool improper) {
    if (value < best.value) best = {value, theta, improper};
  };

  const double step = kTwoPi / static_cast<double>(grid_steps);
  for (const bool improper : {false, true}) {
    std::vector<double> values(grid_steps);
    for (std::size_t s = 0; s < grid_steps; ++s) {
      values[s] = objective(step * static_cast<double>(s), improper);
      record(values[s], step * static_cast<double>(s), improper);
    }
    // Local minima of the circular grid, best first.
    std::vector<std::size_t> minima;
    for (std::size_t s = 0; s < grid_steps; ++s) {
      const double prev = values[(s + grid_steps - 1) % grid_steps];
      const double next = values[(s + 1) % grid_steps];
      if (values[s] <= prev && values[s] <= next) minima.push_back(s);
    }
    std::stable_sort(minima.begin(), minima.end(),
                     [&](auto a, auto b) { return values[a] < values[b]; });
    if (minima.size() > 4) minima.resize(4);

    const double half = grid_steps == 1 ? std::numbers::pi : step;
    for (const auto s : minima) {
      // Golden-section search on [theta_s - h, theta_s + h].
      const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = step * static_cast<double>(s) - half;
      double hi = step * static_cast<double>(s) + half;
      double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
      double f1 = objective(x1, improper), f2 = objective(x2, improper);
      record(f1, x1, improper);
      record(f2, x2, improper);
      while (hi - lo > 1e-10) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - invphi * (hi - lo);
          f1 = objective(x1, improper);
          record(f1, x1, improper);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + invphi * (hi - lo);
          f2 = objective(x2, improper);
          record(f2, x2, improper);
        }
      }
    }
  }

  Matrix rot = planar_orthogonal(best.theta, best.improper);
  Vector t = b_nu - rot * b_mu;

  if (p != 2.0) {
    // Barycenter alignment is only a starting point when p != 2: pattern
    // search over (theta, t) inside the pruning ball.
    const auto region = translation_search_region(mu, nu, p);
    auto full_objective = [&](double theta, const Vector& shift) {
      const Isometry g(planar_orthogonal(theta, best.improper), shift);
      if (outside_search_region(region, g)) return std::numeric_limits<double>::infinity();
      ++evaluations;
      return wasserstein_exact(pushforward(mu, g), nu, p).cost;
    };
    double theta = best.theta;
    double value = full_objective(theta, t);
    double angle_step = step / 2.0;
    double shift_step = std::max(region.inner_radius, 1e-3) / 4.0;
    for (std::size_t guard = 0; guard < 20000 && (angle_step > 1e-10 || shift_step > 1e-10);
         ++guard) {
      bool improved = false;
      for (const double d : {angle_step, -angle_step}) {
        const double v = full_objective(theta + d, t);
        if (v < value) {
          value = v;
          theta += d;
          improved = true;
        }
      }
      for (Eigen::Index axis = 0; axis < 2; ++axis) {
        for (const double d : {shift_step, -shift_step}) {
          Vector cand = t;
          cand(axis) += d;
          const double v = full_objective(theta, cand);
          if (v < value) {
            value = v;
            t = cand;
            improved = true;
          }
        }
      }
      if (!improved) {
        angle_step *= 0.5;
        shift_step *= 0.5;
      }
    }
    rot = planar_orthogonal(theta, best.improper);
  }

  auto result = finalize(mu, nu, Isometry(std::move(rot), std::move(t)), p, 2 * grid_steps,
                         evaluations, true);
  result.certificate = 0.0;
  return result;
}

}  // namespace shapeot
