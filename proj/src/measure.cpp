#include "shapeot/measure.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace shapeot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::ZeroTotalMass: return "ZeroTotalMass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::NonUniformWeights: return "NonUniformWeights";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::TOutOfRange: return "TOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DimensionNot2: return "DimensionNot2";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateEndpoints: return "DegenerateEndpoints";
    case ErrorCode::BoundaryIndex: return "BoundaryIndex";
    case ErrorCode::BadSwitchFunction: return "BadSwitchFunction";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MeasureMismatch: return "MeasureMismatch";
    case ErrorCode::BadStep: return "BadStep";
    case ErrorCode::SkewnessViolation: return "SkewnessViolation";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights) {
  if (points.rows() < 1 || points.cols() < 1)
    throw Error(ErrorCode::DimensionMismatch, "measure needs at least one atom and one coordinate");
  if (points.rows() != weights.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(points.rows()) + " atoms but " +
                    std::to_string(weights.size()) + " weights");
  if (!points.allFinite() || !weights.allFinite())
    throw Error(ErrorCode::DimensionMismatch, "non-finite coordinate or weight");
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (weights(k) < 0.0)
      throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(k) + " is negative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalMass, "total weight is zero");
  if (std::abs(total - 1.0) > 1e-14) weights /= total;
  data_ = std::make_shared<const Data>(Data{std::move(points), std::move(weights)});
}

bool DiscreteMeasure::same_as(const DiscreteMeasure& other) const {
  if (data_ == other.data_) return true;
  return points().rows() == other.points().rows() && dim() == other.dim() &&
         points() == other.points() && weights() == other.weights();
}

DiscreteMeasure make_measure(Matrix points, Vector weights) {
  return DiscreteMeasure(std::move(points), std::move(weights));
}

DiscreteMeasure uniform_measure(Matrix points) {
  const auto m = points.rows();
  return DiscreteMeasure(std::move(points), Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

DiscreteMeasure dirac(const Vector& x) {
  return DiscreteMeasure(x.transpose(), Vector::Ones(1));
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<Vector(const Vector&)>& map) {
  Matrix out(mu.size(), mu.dim());
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    Vector y = map(mu.atom(k));
    if (y.size() != mu.dim() && k == 0) out.resize(mu.size(), y.size());
    if (y.size() != out.cols())
      throw Error(ErrorCode::DimensionMismatch, "map changed output dimension between atoms");
    out.row(k) = y.transpose();
  }
  return DiscreteMeasure(std::move(out), mu.weights());
}

Vector barycenter(const DiscreteMeasure& mu) {
  return mu.points().transpose() * mu.weights();
}

double second_moment(const DiscreteMeasure& mu, const Vector& x0) {
  if (x0.size() != mu.dim())
    throw Error(ErrorCode::DimensionMismatch, "reference point has wrong dimension");
  double s = 0.0;
  for (Eigen::Index k = 0; k < mu.size(); ++k)
    s += mu.weight(k) * (mu.points().row(k).transpose() - x0).squaredNorm();
  return s;
}

DiscreteMeasure consolidate(const DiscreteMeasure& mu, double eps) {
  std::vector<Eigen::Index> reps;
  std::vector<double> w;
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    bool merged = false;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const double d = (mu.points().row(k) - mu.points().row(reps[r])).norm();
      if (d <= eps) {
        w[r] += mu.weight(k);
        merged = true;
        break;
      }
    }
    if (!merged) {
      reps.push_back(k);
      w.push_back(mu.weight(k));
    }
  }
  Matrix pts(static_cast<Eigen::Index>(reps.size()), mu.dim());
  Vector wv(static_cast<Eigen::Index>(reps.size()));
  for (std::size_t r = 0; r < reps.size(); ++r) {
    pts.row(static_cast<Eigen::Index>(r)) = mu.points().row(reps[r]);
    wv(static_cast<Eigen::Index>(r)) = w[r];
  }
  return DiscreteMeasure(std::move(pts), std::move(wv));
}

DiscreteMeasure prune(const DiscreteMeasure& mu, double threshold) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < mu.size(); ++k)
    if (mu.weight(k) > threshold) keep.push_back(k);
  if (keep.empty()) throw Error(ErrorCode::ZeroTotalMass, "prune removed every atom");
  Matrix pts(static_cast<Eigen::Index>(keep.size()), mu.dim());
  Vector wv(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    pts.row(static_cast<Eigen::Index>(r)) = mu.points().row(keep[r]);
    wv(static_cast<Eigen::Index>(r)) = mu.weight(keep[r]);
  }
  return DiscreteMeasure(std::move(pts), std::move(wv));
}

DiscreteMeasure mixture(const DiscreteMeasure& a, const DiscreteMeasure& b, double lambda) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "mixture of measures in different dimensions");
  if (lambda <= 0.0) return a;
  if (lambda >= 1.0) return b;
  Matrix pts(a.size() + b.size(), a.dim());
  pts << a.points(), b.points();
  Vector w(a.size() + b.size());
  w << (1.0 - lambda) * a.weights(), lambda * b.weights();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure centered(const DiscreteMeasure& mu) {
  const Vector c = barycenter(mu);
  Matrix pts = mu.points().rowwise() - c.transpose();
  return DiscreteMeasure(std::move(pts), mu.weights());
}

DiscreteMeasure scaled(const DiscreteMeasure& mu, double lambda) {
  return DiscreteMeasure(mu.points() * lambda, mu.weights());
}

DiscreteMeasure embed(const DiscreteMeasure& mu, Eigen::Index extra) {
  Matrix pts = Matrix::Zero(mu.size(), mu.dim() + extra);
  pts.leftCols(mu.dim()) = mu.points();
  return DiscreteMeasure(std::move(pts), mu.weights());
}

TestFunction TestFunction::quadratic(double constant, Vector linear, Matrix quadratic) {
  if (quadratic.rows() != linear.size() || quadratic.cols() != linear.size())
    throw Error(ErrorCode::DimensionMismatch, "quadratic test function shape mismatch");
  Matrix sym = 0.5 * (quadratic + quadratic.transpose());
  return TestFunction(QuadraticFunction{constant, std::move(linear), std::move(sym)});
}

TestFunction TestFunction::gaussian(Vector center, double width) {
  if (!(width > 0.0)) throw Error(ErrorCode::ConfigInvalid, "gaussian width must be positive");
  return TestFunction(GaussianBump{std::move(center), width});
}

double TestFunction::value(const Vector& x) const {
  if (const auto* q = std::get_if<QuadraticFunction>(&kind_))
    return q->constant + q->linear.dot(x) + x.dot(q->quadratic * x);
  const auto& g = std::get<GaussianBump>(kind_);
  return std::exp(-(x - g.center).squaredNorm() / (2.0 * g.width * g.width));
}

Vector TestFunction::gradient(const Vector& x) const {
  if (const auto* q = std::get_if<QuadraticFunction>(&kind_))
    return q->linear + 2.0 * q->quadratic * x;
  const auto& g = std::get<GaussianBump>(kind_);
  const double s2 = g.width * g.width;
  return -(x - g.center) / s2 * value(x);
}

Eigen::Index TestFunction::dim() const {
  if (const auto* q = std::get_if<QuadraticFunction>(&kind_)) return q->linear.size();
  return std::get<GaussianBump>(kind_).center.size();
}

double TestFunction::integrate(const DiscreteMeasure& mu) const {
  if (mu.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "test function dimension");
  double s = 0.0;
  for (Eigen::Index k = 0; k < mu.size(); ++k) s += mu.weight(k) * value(mu.atom(k));
  return s;
}

}  // namespace shapeot
