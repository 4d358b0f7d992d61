#include "shapeot/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace shapeot {
namespace {

void require_same_measure(const DiscreteVectorField& u, const DiscreteVectorField& v) {
  if (!u.measure().same_as(v.measure()))
    throw Error(ErrorCode::MeasureMismatch, "vector fields are attached to different measures");
}

double field_norm(const DiscreteMeasure& mu, const IsoAlgebraElement& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < mu.size(); ++k)
    s += mu.weight(k) * fundamental_field(x, mu.atom(k)).squaredNorm();
  return std::sqrt(s);
}

}  // namespace

DiscreteVectorField::DiscreteVectorField(DiscreteMeasure measure, Matrix vectors)
    : measure_(std::move(measure)), vectors_(std::move(vectors)) {
  if (vectors_.rows() != measure_.size() || vectors_.cols() != measure_.dim())
    throw Error(ErrorCode::DimensionMismatch, "vector field shape does not match its measure");
}

DiscreteVectorField DiscreteVectorField::zero(const DiscreteMeasure& measure) {
  return DiscreteVectorField(measure, Matrix::Zero(measure.size(), measure.dim()));
}

DiscreteVectorField DiscreteVectorField::fundamental(const DiscreteMeasure& measure,
                                                     const IsoAlgebraElement& x) {
  if (x.dim() != measure.dim())
    throw Error(ErrorCode::DimensionMismatch, "algebra element dimension");
  Matrix v(measure.size(), measure.dim());
  for (Eigen::Index k = 0; k < measure.size(); ++k)
    v.row(k) = fundamental_field(x, measure.atom(k)).transpose();
  return DiscreteVectorField(measure, std::move(v));
}

double DiscreteVectorField::norm() const { return std::sqrt(l2_inner(*this, *this)); }

double l2_inner(const DiscreteVectorField& u, const DiscreteVectorField& v) {
  require_same_measure(u, v);
  const Vector dots = u.vectors().cwiseProduct(v.vectors()).rowwise().sum();
  return u.measure().weights().dot(dots);
}

DiscreteVectorField operator+(const DiscreteVectorField& u, const DiscreteVectorField& v) {
  require_same_measure(u, v);
  return DiscreteVectorField(u.measure(), u.vectors() + v.vectors());
}

DiscreteVectorField operator-(const DiscreteVectorField& u, const DiscreteVectorField& v) {
  require_same_measure(u, v);
  return DiscreteVectorField(u.measure(), u.vectors() - v.vectors());
}

OrbitSubspaceReport orbit_subspace(const DiscreteMeasure& mu, double rank_rel_tol) {
  const auto m = mu.size();
  const auto n = mu.dim();
  const auto basis = killing_basis(n);
  const auto cols = static_cast<Eigen::Index>(basis.size());

  Matrix eval(m * n, cols);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double s = std::sqrt(mu.weight(k));
    const Vector x = mu.atom(k);
    for (Eigen::Index l = 0; l < cols; ++l)
      eval.block(k * n, l, n, 1) = s * fundamental_field(basis[static_cast<std::size_t>(l)], x);
  }

  Eigen::JacobiSVD<Matrix> svd(eval, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  if (top > 0.0)
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_rel_tol * top) ++rank;

  std::vector<IsoAlgebraElement> kernel;
  const Matrix& v = svd.matrixV();
  for (Eigen::Index l = rank; l < cols; ++l) kernel.push_back(from_coordinates(v.col(l), n));

  return OrbitSubspaceReport{mu,
                             std::move(eval),
                             sv,
                             rank,
                             m * n,
                             m * n - rank,
                             std::move(kernel),
                             rank_rel_tol,
                             svd.matrixU(),
                             v};
}

OrbitSplit project_onto_orbit(const DiscreteVectorField& v, const OrbitSubspaceReport& report) {
  if (!v.measure().same_as(report.measure))
    throw Error(ErrorCode::MeasureMismatch, "field is not attached to the report's measure");
  const auto& mu = report.measure;
  const auto m = mu.size();
  const auto n = mu.dim();

  Vector z(m * n);
  for (Eigen::Index k = 0; k < m; ++k)
    z.segment(k * n, n) = std::sqrt(mu.weight(k)) * v.vectors().row(k).transpose();

  // Least-squares coefficients of z in the column span: V_r S_r^-1 U_r^T z.
  const auto r = report.rank;
  Vector coeffs = Vector::Zero(report.evaluation_matrix.cols());
  if (r > 0) {
    const Vector proj = report.left_vectors.leftCols(r).transpose() * z;
    coeffs = report.right_vectors.leftCols(r) *
             (proj.array() / report.singular_values.head(r).array()).matrix();
  }
  auto generator = from_coordinates(coeffs, n);
  auto orbit = DiscreteVectorField::fundamental(mu, generator);
  auto shape = v - orbit;
  return OrbitSplit{std::move(orbit), std::move(shape), std::move(generator)};
}

double continuity_residual(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                           const TestFunction& phi, const std::vector<double>& t_grid,
                           double fd_step) {
  if (!(fd_step > 0.0) || !std::isfinite(fd_step))
    throw Error(ErrorCode::BadStep, "finite-difference step must be positive");
  if (x.dim() != mu.dim() || phi.dim() != mu.dim())
    throw Error(ErrorCode::DimensionMismatch, "continuity residual dimensions");
  double worst = 0.0;
  for (const double t : t_grid) {
    const double ahead = phi.integrate(flow_pushforward(mu, x, t + fd_step));
    const double behind = phi.integrate(flow_pushforward(mu, x, t - fd_step));
    const double dt = (ahead - behind) / (2.0 * fd_step);
    const auto mu_t = flow_pushforward(mu, x, t);
    double transport = 0.0;
    for (Eigen::Index k = 0; k < mu_t.size(); ++k) {
      const Vector p = mu_t.atom(k);
      transport += mu_t.weight(k) * phi.gradient(p).dot(fundamental_field(x, p));
    }
    worst = std::max(worst, std::abs(dt - transport));
  }
  return worst;
}

double flow_norm_invariance(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                            const std::vector<double>& t_grid) {
  const double base = field_norm(mu, x);
  double worst = 0.0;
  for (const double t : t_grid)
    worst = std::max(worst, std::abs(field_norm(flow_pushforward(mu, x, t), x) - base));
  return worst;
}

double l1_in_time_norm(const DiscreteMeasure& mu, const IsoAlgebraElement& x,
                       std::size_t quadrature_steps) {
  if (quadrature_steps < 1) throw Error(ErrorCode::BadStep, "quadrature needs at least one step");
  const double h = 1.0 / static_cast<double>(quadrature_steps);
  double total = 0.0;
  for (std::size_t i = 0; i <= quadrature_steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const double f = field_norm(flow_pushforward(mu, x, t), x);
    total += (i == 0 || i == quadrature_steps) ? 0.5 * f : f;
  }
  return total * h;
}

IndependenceCheck representative_independence_check(const DiscreteMeasure& mu,
                                                    const Isometry& g, std::uint64_t seed,
                                                    std::size_t probes) {
  const auto moved = pushforward(mu, g);
  const auto report_mu = orbit_subspace(mu);
  const auto report_gmu = orbit_subspace(moved);

  IndependenceCheck out;
  out.rank_mu = report_mu.rank;
  out.rank_gmu = report_gmu.rank;
  out.shape_dim_mu = report_mu.shape_tangent_dim;
  out.shape_dim_gmu = report_gmu.shape_tangent_dim;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix& rot = g.rotation();
  for (std::size_t probe = 0; probe < probes; ++probe) {
    Matrix vec(mu.size(), mu.dim());
    for (Eigen::Index i = 0; i < vec.rows(); ++i)
      for (Eigen::Index j = 0; j < vec.cols(); ++j) vec(i, j) = normal(rng);
    const DiscreteVectorField v(mu, vec);
    const double scale = v.norm();
    if (scale == 0.0) continue;

    const Matrix shape_then_dg = project_onto_orbit(v, report_mu).shape.vectors() * rot.transpose();
    const DiscreteVectorField dg_v(moved, vec * rot.transpose());
    const auto dg_then_shape = project_onto_orbit(dg_v, report_gmu).shape;
    const DiscreteVectorField diff(moved, shape_then_dg - dg_then_shape.vectors());
    out.discrepancy = std::max(out.discrepancy, diff.norm() / scale);
  }
  return out;
}

}  // namespace shapeot
