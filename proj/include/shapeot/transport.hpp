#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "shapeot/measure.hpp"

namespace shapeot {

struct CouplingEntry {
  Eigen::Index row;
  Eigen::Index col;
  double weight;
};

// Admissible transport plan between `source` (rows) and `target` (columns).
// Stored densely up to kDenseCouplingLimit entries, as a row-major triplet
// list above.
class Coupling {
 public:
  static constexpr Eigen::Index kDenseCouplingLimit = 4'000'000;

  Coupling(DiscreteMeasure source, DiscreteMeasure target, Matrix dense);
  Coupling(DiscreteMeasure source, DiscreteMeasure target,
           std::vector<CouplingEntry> entries);

  const DiscreteMeasure& source() const { return source_; }
  const DiscreteMeasure& target() const { return target_; }
  Eigen::Index rows() const { return source_.size(); }
  Eigen::Index cols() const { return target_.size(); }
  bool is_dense() const { return std::holds_alternative<Matrix>(storage_); }

  // Nonzero entries in row-major order.
  std::vector<CouplingEntry> nonzeros() const;
  Matrix to_dense() const;
  Vector row_sums() const;
  Vector col_sums() const;

  // max(|row_sums - mu|_1, |col_sums - nu|_1)
  double marginal_residual() const;

  // sum gamma_ij |x_i - y_j|^p
  double cost(double p) const;

 private:
  DiscreteMeasure source_;
  DiscreteMeasure target_;
  std::variant<Matrix, std::vector<CouplingEntry>> storage_;
};

enum class SolverTag { exact, entropic, oracle };
std::string_view to_string(SolverTag tag);

struct TransportResult {
  double cost = 0.0;      // sum gamma_ij d^p
  double distance = 0.0;  // cost^(1/p)
  Coupling coupling;
  SolverTag solver = SolverTag::exact;
  std::size_t iterations = 0;
};

// |x - y|^p, exactly 0 for coincident points.
double ground_cost(const Vector& x, const Vector& y, double p);
Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// Globally optimal plan for the discrete transport linear program. Equal
// cardinality uniform inputs go to an assignment solver, everything else to
// a transportation simplex. Deterministic for fixed inputs.
TransportResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  double p);

// Exhaustive search over all m! matchings; uniform inputs with m = k <= 8.
TransportResult wasserstein_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double p);

struct EntropicOptions {
  double epsilon = 1e-2;
  std::size_t max_iter = 5000;
  double marginal_tol = 1e-9;
};

// Log-domain Sinkhorn with geometric epsilon annealing, followed by a
// rounding step that makes the plan exactly admissible (up to roundoff).
// Epsilon is absolute, in units of the ground cost.
TransportResult wasserstein_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double p, const EntropicOptions& options = {});

// ((1 - t) pi_1 + t pi_2)_# gamma: one atom per nonzero entry.
DiscreteMeasure displacement_interpolation(const Coupling& coupling, double t);

// True when an optimal plan moves every atom by at most `tol`. Plan entries
// below 1e-12 are treated as marginal roundoff.
bool atomwise_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);

}  // namespace shapeot
