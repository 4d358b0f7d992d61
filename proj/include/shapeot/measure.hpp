#pragma once

#include <functional>
#include <memory>
#include <variant>

#include <Eigen/Dense>

#include "shapeot/error.hpp"

namespace shapeot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Finitely supported probability measure on R^n, stored as an m x n matrix
// of atoms (one per row) and m nonnegative weights summing to one.
//
// Values are immutable and cheap to copy: copies share the same storage.
class DiscreteMeasure {
 public:
  // Validates and normalizes. Weights already summing to one within 1e-14
  // are kept bit-for-bit. Throws NegativeWeight, ZeroTotalMass or
  // DimensionMismatch.
  DiscreteMeasure(Matrix points, Vector weights);

  Eigen::Index size() const { return data_->points.rows(); }
  Eigen::Index dim() const { return data_->points.cols(); }

  const Matrix& points() const { return data_->points; }
  const Vector& weights() const { return data_->weights; }

  Vector atom(Eigen::Index k) const { return data_->points.row(k).transpose(); }
  double weight(Eigen::Index k) const { return data_->weights(k); }

  // True when both measures hold identical atoms and weights (bitwise).
  bool same_as(const DiscreteMeasure& other) const;

 private:
  struct Data {
    Matrix points;
    Vector weights;
  };
  std::shared_ptr<const Data> data_;
};

DiscreteMeasure make_measure(Matrix points, Vector weights);

// Uniform weights on the rows of `points`.
DiscreteMeasure uniform_measure(Matrix points);

DiscreteMeasure dirac(const Vector& x);

// Atoms mapped through `map`, weights untouched.
DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<Vector(const Vector&)>& map);

Vector barycenter(const DiscreteMeasure& mu);

// sum_k w_k |x_k - x0|^2
double second_moment(const DiscreteMeasure& mu, const Vector& x0);

// Merges atoms lying within `eps` of an earlier atom into that atom.
// With eps = 0 only exact duplicates are merged.
DiscreteMeasure consolidate(const DiscreteMeasure& mu, double eps = 0.0);

// Drops atoms whose weight is <= threshold and renormalizes.
DiscreteMeasure prune(const DiscreteMeasure& mu, double threshold = 0.0);

// (1 - lambda) * a + lambda * b as a union of weighted atoms.
DiscreteMeasure mixture(const DiscreteMeasure& a, const DiscreteMeasure& b,
                        double lambda);

// Atoms translated so the barycenter sits at the origin.
DiscreteMeasure centered(const DiscreteMeasure& mu);

// Atoms scaled by lambda about the origin.
DiscreteMeasure scaled(const DiscreteMeasure& mu, double lambda);

// Appends `extra` zero coordinates to every atom (R^n -> R^{n+extra}).
DiscreteMeasure embed(const DiscreteMeasure& mu, Eigen::Index extra);

// Closed-form test functions for weak continuity-equation residuals.
struct QuadraticFunction {
  double constant = 0.0;
  Vector linear;     // b
  Matrix quadratic;  // symmetric Q; value c + b.x + x.Qx
};

struct GaussianBump {
  Vector center;
  double width = 1.0;  // exp(-|x - c|^2 / (2 width^2))
};

class TestFunction {
 public:
  static TestFunction quadratic(double constant, Vector linear, Matrix quadratic);
  static TestFunction gaussian(Vector center, double width);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Eigen::Index dim() const;

  // Integral against mu.
  double integrate(const DiscreteMeasure& mu) const;

  const std::variant<QuadraticFunction, GaussianBump>& kind() const { return kind_; }

 private:
  explicit TestFunction(std::variant<QuadraticFunction, GaussianBump> k)
      : kind_(std::move(k)) {}
  std::variant<QuadraticFunction, GaussianBump> kind_;
};

}  // namespace shapeot
