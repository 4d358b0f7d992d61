#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapeot/transport.hpp"

namespace shapeot {
namespace {

// eps * log sum_j exp(z_j / eps)
double soft_max(const Vector& z, double eps) {
  const double top = z.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + eps * std::log(((z.array() - top) / eps).exp().sum());
}

struct Potentials {
  Vector f, g;
};

// One stage of log-domain Sinkhorn at fixed epsilon. Returns the row residual
// after the last sweep (columns are exact after each sweep).
double sinkhorn_stage(const Vector& log_a, const Vector& log_b, const Matrix& c, double eps,
                      std::size_t budget, double tol, Potentials& pot, std::size_t& used) {
  const Eigen::Index m = c.rows(), k = c.cols();
  double residual = std::numeric_limits<double>::infinity();
  Vector z_row(k), z_col(m);
  for (std::size_t it = 0; it < budget; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      z_row = pot.g - c.row(i).transpose();
      pot.f(i) = eps * log_a(i) - soft_max(z_row, eps);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      z_col = pot.f - c.col(j);
      pot.g(j) = eps * log_b(j) - soft_max(z_col, eps);
    }
    ++used;
    if (!pot.f.allFinite() || !pot.g.allFinite())
      throw Error(ErrorCode::NumericalUnderflow,
                  "non-finite potentials at epsilon " + std::to_string(eps));
    residual = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double row = ((pot.g.array() - c.row(i).transpose().array() + pot.f(i)) / eps).exp().sum();
      residual += std::abs(row - std::exp(log_a(i)));
    }
    if (residual < tol) break;
  }
  return residual;
}

// Rounds an approximate plan onto the transport polytope: shrink rows and
// columns that exceed their marginals, then add the rank-one correction.
Matrix round_to_marginals(Matrix plan, const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    const double r = plan.row(i).sum();
    if (r > a(i)) plan.row(i) *= a(i) / r;
  }
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    const double s = plan.col(j).sum();
    if (s > b(j)) plan.col(j) *= b(j) / s;
  }
  const Vector err_a = (a - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector err_b = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_a.sum();
  if (mass > 0.0) plan += err_a * err_b.transpose() / mass;
  return plan;
}

}  // namespace

TransportResult wasserstein_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double p, const EntropicOptions& options) {
  if (mu.dim() != nu.dim())
    throw Error(ErrorCode::DimensionMismatch, "entropic transport between different dimensions");
  if (!(options.epsilon > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "epsilon must be positive");
  if (!(p >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "exponent p must be >= 1");

  // Zero-weight atoms carry no mass; solve on the positive support only.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu.weight(i) > 0.0) rows.push_back(i);
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (nu.weight(j) > 0.0) cols.push_back(j);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(cols.size());

  Matrix c(m, k);
  Vector a(m), b(k);
  for (Eigen::Index i = 0; i < m; ++i) a(i) = mu.weight(rows[i]);
  for (Eigen::Index j = 0; j < k; ++j) b(j) = nu.weight(cols[j]);
  a /= a.sum();
  b /= b.sum();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      c(i, j) = ground_cost(mu.atom(rows[i]), nu.atom(cols[j]), p);
  if (!std::isfinite(c.maxCoeff() / options.epsilon))
    throw Error(ErrorCode::NumericalUnderflow,
                "cost / epsilon overflows; anneal with a larger epsilon");
  const Vector log_a = a.array().log();
  const Vector log_b = b.array().log();

  Potentials pot{Vector::Zero(m), Vector::Zero(k)};
  std::size_t used = 0;
  const double target = options.epsilon;
  double eps = std::max(target, c.maxCoeff());
  while (eps > target && used < options.max_iter) {
    sinkhorn_stage(log_a, log_b, c, eps, std::min<std::size_t>(50, options.max_iter - used),
                   1e-3, pot, used);
    eps = std::max(target, 0.5 * eps);
  }
  if (used < options.max_iter)
    sinkhorn_stage(log_a, log_b, c, target, options.max_iter - used, options.marginal_tol, pot,
                   used);

  Matrix plan(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      plan(i, j) = std::exp((pot.f(i) + pot.g(j) - c(i, j)) / target);
  if (!plan.allFinite() || !(plan.sum() > 0.5))
    throw Error(ErrorCode::NumericalUnderflow,
                "entropic plan lost its mass; anneal with a larger epsilon");
  plan = round_to_marginals(std::move(plan), a, b);

  Matrix full = Matrix::Zero(mu.size(), nu.size());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j) full(rows[i], cols[j]) = plan(i, j);
  // Match the stored marginals exactly up to roundoff.
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = full.row(rows[i]).sum();
    if (r > 0.0) full.row(rows[i]) *= mu.weight(rows[i]) / r;
  }

  Coupling coupling = [&] {
    if (mu.size() * nu.size() <= Coupling::kDenseCouplingLimit)
      return Coupling(mu, nu, std::move(full));
    std::vector<CouplingEntry> entries;
    for (Eigen::Index i = 0; i < full.rows(); ++i)
      for (Eigen::Index j = 0; j < full.cols(); ++j)
        if (full(i, j) > 0.0) entries.push_back({i, j, full(i, j)});
    return Coupling(mu, nu, std::move(entries));
  }();
  const double cost = std::max(coupling.cost(p), 0.0);
  const double distance = p == 2.0 ? std::sqrt(cost) : std::pow(cost, 1.0 / p);
  return TransportResult{cost, distance, std::move(coupling), SolverTag::entropic, used};
}

}  // namespace shapeot
