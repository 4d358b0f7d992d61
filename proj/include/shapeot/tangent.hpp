#pragma once

#include <utility>
#include <vector>

#include "shapeot/isometry.hpp"

namespace shapeot {

// One vector per atom of `measure`: an element of L^2(mu), which for finitely
// supported mu is the whole Wasserstein tangent space.
class DiscreteVectorField {
 public:
  // Throws DimensionMismatch unless vectors is m x n for the measure.
  DiscreteVectorField(DiscreteMeasure measure, Matrix vectors);

  static DiscreteVectorField zero(const DiscreteMeasure& measure);
  static DiscreteVectorField fundamental(const DiscreteMeasure& measure,
                                         const IsoAlgebraElement& x);

  const DiscreteMeasure& measure() const { return measure_; }
  const Matrix& vectors() const { return vectors_; }

  double norm() const;

 private:
  DiscreteMeasure measure_;
  Matrix vectors_;
};

// sum_k w_k <u_k, v_k>; throws MeasureMismatch.
double l2_inner(const DiscreteVectorField& u, const DiscreteVectorField& v);

DiscreteVectorField operator+(const DiscreteVectorField& u, const DiscreteVectorField& v);
DiscreteVectorField operator-(const DiscreteVectorField& u, const DiscreteVectorField& v);

// The subspace U_mu of L^2(mu) spanned by fundamental fields.
struct OrbitSubspaceReport {
  DiscreteMeasure measure;
  // Row k*n + d, column l: sqrt(w_k) * (X_l~(x_k))_d for the Killing basis X_l.
  Matrix evaluation_matrix;
  Vector singular_values;  // descending
  Eigen::Index rank = 0;
  Eigen::Index tangent_dim = 0;        // dim T_mu W = m n
  Eigen::Index shape_tangent_dim = 0;  // m n - rank
  std::vector<IsoAlgebraElement> kernel_basis;
  double rank_rel_tol = 1e-8;

  Matrix left_vectors;   // thin U
  Matrix right_vectors;  // full V
};

OrbitSubspaceReport orbit_subspace(const DiscreteMeasure& mu, double rank_rel_tol = 1e-8);

struct OrbitSplit {
  DiscreteVectorField orbit;  // in U_mu
  DiscreteVectorField shape;  // L^2(mu)-orthogonal to U_mu
  IsoAlgebraElement generator;  // X with orbit = X~ on the atoms
};

// Orthogonal projection in L^2(mu) onto U_mu and its complement.
OrbitSplit project_onto_orbit(const DiscreteVectorField& v, const OrbitSubspaceReport& report);

// max over t of |d/dt int phi d mu_t - int <grad phi, X~> d mu_t| with
// mu_t = exp(-tX)_# mu, the time derivative by central differences.
// Throws BadStep.
double continuity_residual(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                           const TestFunction& phi, const std::vector<double>& t_grid,
                           double fd_step);

// max over t of | |X~|_{L^2(mu_t)} - |X~|_{L^2(mu)} |.
double flow_norm_invariance(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                            const std::vector<double>& t_grid);

// Trapezoidal value of int_0^1 |X~|_{L^2(mu_t)} dt.
double l1_in_time_norm(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                       std::size_t quadrature_steps);

struct IndependenceCheck {
  double discrepancy = 0.0;  // max relative commutation error over the probes
  Eigen::Index rank_mu = 0, rank_gmu = 0;
  Eigen::Index shape_dim_mu = 0, shape_dim_gmu = 0;
};

// Compares U_mu and U_{g#mu}: ranks, quotient dimensions, and whether the
// differential v_k -> R v_k commutes with the projection onto the orbit
// complement for `probes` random fields.
IndependenceCheck representative_independence_check(const DiscreteMeasure& mu,
                                                    const Isometry& g, std::uint64_t seed = 0,
                                                    std::size_t probes = 8);

}  // namespace shapeot
