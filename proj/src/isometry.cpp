#include "shapeot/isometry.hpp"

#include <cmath>
#include <random>
#include <string>

namespace shapeot {
namespace {

void require_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions " +
                                                  std::to_string(a) + " and " + std::to_string(b));
}

// Coefficient functions for A with A^3 = -w^2 A (every skew matrix in n <= 3):
//   sin(th)/th, (1 - cos th)/th^2, (th - sin th)/th^3.
struct RotationCoefficients {
  double c1, c2, c3;
};

RotationCoefficients rotation_coefficients(double th) {
  if (std::abs(th) < 0.5) {
    // Alternating Taylor series; 8 terms is below roundoff for |th| < 0.5.
    const double x = th * th;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double term1 = 1.0, term2 = 0.5, term3 = 1.0 / 6.0;
    for (int k = 0; k < 8; ++k) {
      c1 += term1;
      c2 += term2;
      c3 += term3;
      const double a = 2.0 * k + 2.0;
      term1 *= -x / (a * (a + 1.0));
      term2 *= -x / ((a + 1.0) * (a + 2.0));
      term3 *= -x / ((a + 2.0) * (a + 3.0));
    }
    return {c1, c2, c3};
  }
  const double s = std::sin(th), c = std::cos(th);
  return {s / th, (1.0 - c) / (th * th), (th - s) / (th * th * th)};
}

// exp of the (n+1)x(n+1) augmented matrix [[A, a], [0, 0]].
Matrix expm_series(const Matrix& b) {
  const Eigen::Index d = b.rows();
  const double norm = b.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled_b = b / std::ldexp(1.0, squarings);
  Matrix result = Matrix::Identity(d, d);
  for (int k = 13; k >= 1; --k)
    result = Matrix::Identity(d, d) + scaled_b * result / static_cast<double>(k);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace

Isometry::Isometry(Matrix rotation, Vector translation)
    : rotation_(std::move(rotation)), translation_(std::move(translation)) {
  const auto n = translation_.size();
  if (n < 1 || rotation_.rows() != n || rotation_.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "rotation must be n x n with n = translation size");
  if (!rotation_.allFinite() || !translation_.allFinite())
    throw Error(ErrorCode::NotOrthogonal, "non-finite isometry entries");
  const double drift = (rotation_.transpose() * rotation_ - Matrix::Identity(n, n)).norm();
  if (drift > 1e-6)
    throw Error(ErrorCode::NotOrthogonal,
                "|R^T R - I|_F = " + std::to_string(drift) + " exceeds 1e-6");
  if (drift > 1e-12) {
    Eigen::JacobiSVD<Matrix> svd(rotation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rotation_ = svd.matrixU() * svd.matrixV().transpose();
  }
}

Isometry Isometry::identity(Eigen::Index n) {
  return Isometry(Matrix::Identity(n, n), Vector::Zero(n));
}

Isometry Isometry::translation(Vector t) {
  const auto n = t.size();
  return Isometry(Matrix::Identity(n, n), std::move(t));
}

Isometry compose(const Isometry& g, const Isometry& h) {
  require_dim(g.dim(), h.dim(), "compose");
  return Isometry(g.rotation() * h.rotation(), g.rotation() * h.translation() + g.translation());
}

Isometry inverse(const Isometry& g) {
  Matrix rt = g.rotation().transpose();
  Vector t = -(rt * g.translation());
  return Isometry(std::move(rt), std::move(t));
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const Isometry& g) {
  require_dim(mu.dim(), g.dim(), "pushforward");
  Matrix pts = (mu.points() * g.rotation().transpose()).rowwise() + g.translation().transpose();
  return DiscreteMeasure(std::move(pts), mu.weights());
}

IsoAlgebraElement::IsoAlgebraElement(Matrix skew, Vector drift)
    : skew_(std::move(skew)), drift_(std::move(drift)) {
  const auto n = drift_.size();
  if (n < 1 || skew_.rows() != n || skew_.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "algebra element needs an n x n matrix and n-vector");
  const double scale = std::max(1.0, skew_.cwiseAbs().maxCoeff());
  const double asym = (skew_ + skew_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale))
    throw Error(ErrorCode::SkewnessViolation,
                "|A + A^T|_max = " + std::to_string(asym) + " is not skew-symmetric");
  skew_ = 0.5 * (skew_ - skew_.transpose()).eval();
}

IsoAlgebraElement IsoAlgebraElement::zero(Eigen::Index n) {
  return IsoAlgebraElement(Matrix::Zero(n, n), Vector::Zero(n));
}

Vector IsoAlgebraElement::coordinates() const {
  const auto n = dim();
  Vector c(iso_dimension(n));
  c.head(n) = drift_;
  Eigen::Index l = n;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) c(l++) = skew_(j, i);
  return c;
}

IsoAlgebraElement operator+(const IsoAlgebraElement& x, const IsoAlgebraElement& y) {
  require_dim(x.dim(), y.dim(), "algebra sum");
  return IsoAlgebraElement(x.skew() + y.skew(), x.drift() + y.drift());
}

IsoAlgebraElement operator*(double s, const IsoAlgebraElement& x) {
  return IsoAlgebraElement(s * x.skew(), s * x.drift());
}

IsoAlgebraElement bracket(const IsoAlgebraElement& x, const IsoAlgebraElement& y) {
  require_dim(x.dim(), y.dim(), "bracket");
  const Matrix& a = x.skew();
  const Matrix& b = y.skew();
  return IsoAlgebraElement(a * b - b * a, a * y.drift() - b * x.drift());
}

std::vector<IsoAlgebraElement> killing_basis(Eigen::Index n) {
  std::vector<IsoAlgebraElement> basis;
  basis.reserve(static_cast<std::size_t>(iso_dimension(n)));
  for (Eigen::Index i = 0; i < n; ++i)
    basis.emplace_back(Matrix::Zero(n, n), Vector::Unit(n, i));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Matrix a = Matrix::Zero(n, n);
      a(j, i) = 1.0;
      a(i, j) = -1.0;
      basis.emplace_back(std::move(a), Vector::Zero(n));
    }
  }
  return basis;
}

IsoAlgebraElement from_coordinates(const Vector& coords, Eigen::Index n) {
  if (coords.size() != iso_dimension(n))
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector has wrong length for iso(n)");
  Matrix a = Matrix::Zero(n, n);
  Eigen::Index l = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      a(j, i) = coords(l);
      a(i, j) = -coords(l);
      ++l;
    }
  }
  return IsoAlgebraElement(std::move(a), coords.head(n));
}

Vector fundamental_field(const IsoAlgebraElement& x, const Vector& point) {
  require_dim(x.dim(), point.size(), "fundamental_field");
  return -(x.skew() * point + x.drift());
}

Isometry group_exponential(const IsoAlgebraElement& x, double t) {
  const auto n = x.dim();
  const Matrix& a = x.skew();
  if (n <= 3) {
    const Matrix id = Matrix::Identity(n, n);
    const double w = std::sqrt(0.5 * a.squaredNorm());
    const auto [c1, c2, c3] = rotation_coefficients(w * t);
    const Matrix ta = t * a;
    const Matrix ta2 = ta * ta;
    Matrix rot = id + c1 * ta + c2 * ta2;
    const Matrix v = t * (id + c2 * ta + c3 * ta2);
    return Isometry(std::move(rot), v * x.drift());
  }
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = t * a;
  aug.topRightCorner(n, 1) = t * x.drift();
  const Matrix e = expm_series(aug);
  return Isometry(e.topLeftCorner(n, n), e.topRightCorner(n, 1));
}

DiscreteMeasure flow_pushforward(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                                 double t) {
  require_dim(mu.dim(), x.dim(), "flow_pushforward");
  return pushforward(mu, group_exponential(x, -t));
}

Isometry random_isometry(Eigen::Index n, std::uint64_t seed, OrthogonalComponent component,
                         double translation_radius) {
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  const double det = q.determinant();
  if ((component == OrthogonalComponent::proper && det < 0.0) ||
      (component == OrthogonalComponent::improper && det > 0.0))
    q.col(0) *= -1.0;

  Vector t = Vector::Zero(n);
  if (translation_radius > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) t(i) = normal(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius =
        translation_radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
    const double norm = t.norm();
    if (norm > 0.0) t *= radius / norm;
  }
  return Isometry(std::move(q), std::move(t));
}

AffineField fundamental_affine_field(const IsoAlgebraElement& x) {
  return AffineField{-x.skew(), -x.drift()};
}

AffineField lie_bracket(const AffineField& u, const AffineField& v) {
  return AffineField{v.linear * u.linear - u.linear * v.linear,
                     v.linear * u.offset - u.linear * v.offset};
}

}  // namespace shapeot
