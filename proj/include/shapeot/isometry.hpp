#pragma once

#include <cstdint>
#include <vector>

#include "shapeot/measure.hpp"

namespace shapeot {

// Element of E(n) = O(n) x| R^n acting by x -> R x + t.
class Isometry {
 public:
  // Rotations with |R^T R - I|_F > 1e-12 are repaired through the polar
  // factor; beyond 1e-6 the input is rejected with NotOrthogonal.
  Isometry(Matrix rotation, Vector translation);

  static Isometry identity(Eigen::Index n);
  static Isometry translation(Vector t);

  const Matrix& rotation() const { return rotation_; }
  const Vector& translation() const { return translation_; }
  Eigen::Index dim() const { return translation_.size(); }
  double determinant() const { return rotation_.determinant(); }
  bool is_proper() const { return determinant() > 0.0; }

  Vector apply(const Vector& x) const { return rotation_ * x + translation_; }

 private:
  Matrix rotation_;
  Vector translation_;
};

// (g o h)(x) = g(h(x))
Isometry compose(const Isometry& g, const Isometry& h);
Isometry inverse(const Isometry& g);

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const Isometry& g);

// Element X = (A, a) of iso(n) = so(n) x| R^n.
class IsoAlgebraElement {
 public:
  // Throws SkewnessViolation unless A^T = -A within 1e-12 (scaled by |A|).
  IsoAlgebraElement(Matrix skew, Vector drift);

  static IsoAlgebraElement zero(Eigen::Index n);

  const Matrix& skew() const { return skew_; }
  const Vector& drift() const { return drift_; }
  Eigen::Index dim() const { return drift_.size(); }

  // Coordinates with respect to killing_basis(n).
  Vector coordinates() const;

 private:
  Matrix skew_;
  Vector drift_;
};

IsoAlgebraElement operator+(const IsoAlgebraElement& x, const IsoAlgebraElement& y);
IsoAlgebraElement operator*(double s, const IsoAlgebraElement& x);

// [(A,a), (B,b)] = ([A,B], A b - B a), the commutator of the affine matrices.
IsoAlgebraElement bracket(const IsoAlgebraElement& x, const IsoAlgebraElement& y);

// Basis of iso(n): the n translations P_i, then the rotations M_ij (i < j,
// lexicographic). M_ij has A(j,i) = 1 and A(i,j) = -1, i.e. the field
// x_i d_j - x_j d_i. The ordering is part of the public contract.
std::vector<IsoAlgebraElement> killing_basis(Eigen::Index n);

inline Eigen::Index iso_dimension(Eigen::Index n) { return n * (n + 1) / 2; }

IsoAlgebraElement from_coordinates(const Vector& coords, Eigen::Index n);

// Fundamental field X~(x) = d/dt exp(-tX) x at t = 0, which is -(A x + a).
Vector fundamental_field(const IsoAlgebraElement& x, const Vector& point);

// exp(tX): rotation e^{tA}, translation V(t) a with V(t) = int_0^t e^{sA} ds.
// Closed forms for n <= 3, scaling and squaring on a degree-13 Taylor
// polynomial of the augmented affine matrix otherwise.
Isometry group_exponential(const IsoAlgebraElement& x, double t);

// exp(-tX)_# mu
DiscreteMeasure flow_pushforward(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                                 double t);

enum class OrthogonalComponent { proper, improper, either };

// Haar-distributed rotation on the requested component of O(n) plus a
// translation uniform in the ball of the given radius. Deterministic per seed.
Isometry random_isometry(Eigen::Index n, std::uint64_t seed,
                         OrthogonalComponent component = OrthogonalComponent::either,
                         double translation_radius = 0.0);

// Affine vector field x -> L x + c; closed under the Lie bracket.
struct AffineField {
  Matrix linear;
  Vector offset;

  Vector operator()(const Vector& x) const { return linear * x + offset; }
};

AffineField fundamental_affine_field(const IsoAlgebraElement& x);

// [U, V] = (DV) U - (DU) V for affine U, V.
AffineField lie_bracket(const AffineField& u, const AffineField& v);

}  // namespace shapeot
