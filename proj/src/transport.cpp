#include "shapeot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "transport_detail.hpp"

namespace shapeot {
namespace {

void require_same_dim(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim())
    throw Error(ErrorCode::DimensionMismatch, "measures live in R^" + std::to_string(mu.dim()) +
                                                  " and R^" + std::to_string(nu.dim()));
}

void require_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::ConfigInvalid, "exponent p must be a finite real >= 1");
}

double distance_from_cost(double cost, double p) {
  cost = std::max(cost, 0.0);
  if (p == 1.0) return cost;
  if (p == 2.0) return std::sqrt(cost);
  return std::pow(cost, 1.0 / p);
}

bool is_uniform(const Vector& w) {
  const double ref = w(0);
  return (w.array() - ref).abs().maxCoeff() <= 1e-12 * ref;
}

Coupling make_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       std::vector<CouplingEntry> entries) {
  if (mu.size() * nu.size() <= Coupling::kDenseCouplingLimit) {
    Matrix dense = Matrix::Zero(mu.size(), nu.size());
    for (const auto& e : entries) dense(e.row, e.col) += e.weight;
    return Coupling(mu, nu, std::move(dense));
  }
  return Coupling(mu, nu, std::move(entries));
}

TransportResult finish(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                       std::vector<CouplingEntry> entries, SolverTag tag,
                       std::size_t iterations) {
  Coupling coupling = make_coupling(mu, nu, std::move(entries));
  const double cost = std::max(coupling.cost(p), 0.0);
  return TransportResult{cost, distance_from_cost(cost, p), std::move(coupling), tag,
                         iterations};
}

}  // namespace

std::string_view to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::exact: return "exact";
    case SolverTag::entropic: return "entropic";
    case SolverTag::oracle: return "oracle";
  }
  return "unknown";
}

Coupling::Coupling(DiscreteMeasure source, DiscreteMeasure target, Matrix dense)
    : source_(std::move(source)), target_(std::move(target)), storage_(std::move(dense)) {
  const auto& d = std::get<Matrix>(storage_);
  if (d.rows() != source_.size() || d.cols() != target_.size())
    throw Error(ErrorCode::DimensionMismatch, "coupling shape does not match its marginals");
}

Coupling::Coupling(DiscreteMeasure source, DiscreteMeasure target,
                   std::vector<CouplingEntry> entries)
    : source_(std::move(source)), target_(std::move(target)) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& e : entries)
    if (e.row < 0 || e.row >= source_.size() || e.col < 0 || e.col >= target_.size())
      throw Error(ErrorCode::DimensionMismatch, "coupling entry out of range");
  storage_ = std::move(entries);
}

std::vector<CouplingEntry> Coupling::nonzeros() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) {
    std::vector<CouplingEntry> out;
    for (Eigen::Index i = 0; i < d->rows(); ++i)
      for (Eigen::Index j = 0; j < d->cols(); ++j)
        if ((*d)(i, j) != 0.0) out.push_back({i, j, (*d)(i, j)});
    return out;
  }
  auto entries = std::get<std::vector<CouplingEntry>>(storage_);
  std::erase_if(entries, [](const auto& e) { return e.weight == 0.0; });
  return entries;
}

Matrix Coupling::to_dense() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return *d;
  Matrix out = Matrix::Zero(rows(), cols());
  for (const auto& e : std::get<std::vector<CouplingEntry>>(storage_))
    out(e.row, e.col) += e.weight;
  return out;
}

Vector Coupling::row_sums() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return d->rowwise().sum();
  Vector s = Vector::Zero(rows());
  for (const auto& e : std::get<std::vector<CouplingEntry>>(storage_)) s(e.row) += e.weight;
  return s;
}

Vector Coupling::col_sums() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return d->colwise().sum().transpose();
  Vector s = Vector::Zero(cols());
  for (const auto& e : std::get<std::vector<CouplingEntry>>(storage_)) s(e.col) += e.weight;
  return s;
}

double Coupling::marginal_residual() const {
  const double r = (row_sums() - source_.weights()).lpNorm<1>();
  const double c = (col_sums() - target_.weights()).lpNorm<1>();
  return std::max(r, c);
}

double Coupling::cost(double p) const {
  double total = 0.0;
  for (const auto& e : nonzeros())
    total += e.weight * ground_cost(source_.atom(e.row), target_.atom(e.col), p);
  return total;
}

double ground_cost(const Vector& x, const Vector& y, double p) {
  const double sq = (x - y).squaredNorm();
  if (sq == 0.0) return 0.0;
  if (p == 2.0) return sq;
  const double d = std::sqrt(sq);
  if (p == 1.0) return d;
  return std::pow(d, p);
}

Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require_same_dim(mu, nu);
  Matrix c(mu.size(), nu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      c(i, j) = ground_cost(mu.points().row(i).transpose(), nu.points().row(j).transpose(), p);
  return c;
}

TransportResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  double p) {
  require_same_dim(mu, nu);
  require_exponent(p);
  const Matrix c = cost_matrix(mu, nu, p);

  if (mu.size() == nu.size() && is_uniform(mu.weights()) && is_uniform(nu.weights())) {
    const auto sol = detail::solve_assignment(c);
    std::vector<CouplingEntry> entries;
    entries.reserve(sol.row_to_col.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      entries.push_back({i, sol.row_to_col[static_cast<std::size_t>(i)], mu.weight(i)});
    return finish(mu, nu, p, std::move(entries), SolverTag::exact, 0);
  }

  auto sol = detail::solve_transportation(mu.weights(), nu.weights(), c);
  return finish(mu, nu, p, std::move(sol.basis), SolverTag::exact, sol.pivots);
}

TransportResult wasserstein_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double p) {
  require_same_dim(mu, nu);
  require_exponent(p);
  if (mu.size() != nu.size() || mu.size() > 8)
    throw Error(ErrorCode::OracleTooLarge, "oracle needs m = k <= 8, got " +
                                               std::to_string(mu.size()) + " x " +
                                               std::to_string(nu.size()));
  if (!is_uniform(mu.weights()) || !is_uniform(nu.weights()))
    throw Error(ErrorCode::NonUniformWeights, "oracle needs uniform weights");

  const Matrix c = cost_matrix(mu, nu, p);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(mu.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Eigen::Index> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
    if (s < best_cost) {
      best_cost = s;
      best = perm;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<CouplingEntry> entries;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    entries.push_back({i, best[static_cast<std::size_t>(i)], mu.weight(i)});
  return finish(mu, nu, p, std::move(entries), SolverTag::oracle, count);
}

DiscreteMeasure displacement_interpolation(const Coupling& coupling, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error(ErrorCode::TOutOfRange, "interpolation time must lie in [0, 1]");
  const auto entries = coupling.nonzeros();
  const auto& mu = coupling.source();
  const auto& nu = coupling.target();
  Matrix pts(static_cast<Eigen::Index>(entries.size()), mu.dim());
  Vector w(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t r = 0; r < entries.size(); ++r) {
    const auto& e = entries[r];
    const auto row = static_cast<Eigen::Index>(r);
    if (t == 0.0)
      pts.row(row) = mu.points().row(e.row);
    else if (t == 1.0)
      pts.row(row) = nu.points().row(e.col);
    else
      pts.row(row) = (1.0 - t) * mu.points().row(e.row) + t * nu.points().row(e.col);
    w(row) = e.weight;
  }
  return make_measure(std::move(pts), std::move(w));
}

bool atomwise_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const auto plan = wasserstein_exact(a, b, 2.0);
  // Entries at roundoff level come from marginals that differ in the last bits.
  for (const auto& e : plan.coupling.nonzeros())
    if (e.weight > 1e-12 && (a.atom(e.row) - b.atom(e.col)).norm() > tol) return false;
  return true;
}

}  // namespace shapeot
