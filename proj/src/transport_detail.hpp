#pragma once

#include <cstddef>
#include <vector>

#include "shapeot/transport.hpp"

namespace shapeot::detail {

struct SimplexSolution {
  std::vector<CouplingEntry> basis;  // basic cells, row-major order
  std::size_t pivots = 0;
};

// Transportation simplex (u-v method on a spanning-tree basis). Supplies and
// demands must be nonnegative with equal totals up to roundoff.
SimplexSolution solve_transportation(const Vector& supply, const Vector& demand,
                                     const Matrix& cost);

struct AssignmentSolution {
  std::vector<Eigen::Index> row_to_col;
  double total = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (shortest augmenting
// paths with potentials).
AssignmentSolution solve_assignment(const Matrix& cost);

}  // namespace shapeot::detail
