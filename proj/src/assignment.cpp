#include <limits>

#include "transport_detail.hpp"

namespace shapeot::detail {

AssignmentSolution solve_assignment(const Matrix& cost) {
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) throw Error(ErrorCode::SolverFailure, "assignment needs a square cost");
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual source of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> match(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = match[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw Error(ErrorCode::SolverFailure, "assignment augmentation failed");
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentSolution out;
  out.row_to_col.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index j = 1; j <= n; ++j) out.row_to_col[match[j] - 1] = j - 1;
  for (Eigen::Index i = 0; i < n; ++i) out.total += cost(i, out.row_to_col[i]);
  return out;
}

}  // namespace shapeot::detail
