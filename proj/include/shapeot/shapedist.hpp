#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "shapeot/isometry.hpp"
#include "shapeot/transport.hpp"

namespace shapeot {

enum class InnerSolver { exact, entropic_then_exact };

struct ShapeSolverConfig {
  double p = 2.0;
  std::size_t restarts = 16;
  std::size_t max_alternations = 200;
  double rel_tol = 1e-9;
  InnerSolver inner_solver = InnerSolver::exact;
  double entropic_epsilon = 1e-3;
  std::uint64_t seed = 0;
  // When positive and n = 2, the grid oracle is run afterwards and its gap
  // is stored in ShapeDistanceResult::certificate.
  std::size_t oracle_grid_steps = 0;

  // Throws ConfigInvalid.
  void validate() const;
};

struct ShapeDistanceResult {
  double distance = 0.0;
  Isometry minimizer;
  Coupling coupling;  // between minimizer#mu and nu
  std::size_t restarts_used = 0;
  std::size_t inner_iterations = 0;
  bool converged = false;
  // distance - oracle distance, when the oracle was run.
  std::optional<double> certificate;
};

// Best-found minimum of g -> W_2(g#mu, nu) over E(n) by alternating optimal
// transport and weighted orthogonal Procrustes, with restarts on both
// components of O(n). Only p = 2 is supported (ConfigInvalid otherwise);
// for other p use shape_distance_oracle_2d. Not guaranteed to be global.
ShapeDistanceResult shape_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const ShapeSolverConfig& config = {});

struct AlternationStep {
  Isometry next;
  TransportResult transport;  // plan for the incoming g
};

// One block-coordinate step on barycentered inputs: transport g#mu onto nu,
// then R = U V^T from the SVD of sum_ij gamma_ij y_j x_i^T (no determinant
// correction). The returned isometry has zero translation.
AlternationStep alternation_step(const DiscreteMeasure& mu_centered,
                                 const DiscreteMeasure& nu_centered, const Isometry& g,
                                 double p = 2.0);

// Procrustes half of the step: argmin_{R in O(n)} sum gamma_ij |R x_i - y_j|^2
// for a plan between mu (rows) and nu (columns).
Matrix weighted_procrustes(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const Coupling& plan);

// Exhaustive rotation scan for n = 2: grid_steps angles on each component of
// O(2), exact transport at each, golden-section refinement of the best
// brackets to 1e-10 rad. For p != 2 the translation is further refined by a
// bounded pattern search. Throws DimensionNot2, BudgetExceeded.
ShapeDistanceResult shape_distance_oracle_2d(const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu,
                                             std::size_t grid_steps, double p = 2.0);

struct SearchRegion {
  Vector center;         // midpoint of the two barycenters
  double inner_radius;   // closed ball holding >= 3/4 of both masses
  double radius;         // R'
};

// Ball beyond which no minimizer of g -> W_p(g#mu, nu) can move the center:
// any g with |g(center) - center| > 2 R' has W_p(g#mu, nu) > W_p(mu, nu).
SearchRegion translation_search_region(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double p);
double translation_search_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                double p);
bool outside_search_region(const SearchRegion& region, const Isometry& g);

// Rotation by theta, optionally composed with the reflection diag(1, -1).
Matrix planar_orthogonal(double theta, bool improper);

}  // namespace shapeot
