#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "transport_detail.hpp"

namespace shapeot::detail {
namespace {

struct Cell {
  Eigen::Index row;
  Eigen::Index col;
  double flow;
};

// Basis of m + k - 1 cells forming a spanning tree on the bipartite graph
// rows {0..m-1} + cols {m..m+k-1}.
class Basis {
 public:
  Basis(Eigen::Index m, Eigen::Index k) : m_(m), k_(k), basic_(m, k) { basic_.setZero(); }

  void add(Cell c) {
    basic_(c.row, c.col) = 1;
    cells_.push_back(c);
  }

  void replace(std::size_t slot, Cell c) {
    basic_(cells_[slot].row, cells_[slot].col) = 0;
    basic_(c.row, c.col) = 1;
    cells_[slot] = c;
  }

  bool is_basic(Eigen::Index i, Eigen::Index j) const { return basic_(i, j) != 0; }
  std::vector<Cell>& cells() { return cells_; }
  const std::vector<Cell>& cells() const { return cells_; }

  // adjacency[node] = list of (neighbour node, cell slot)
  std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> adjacency() const {
    std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> adj(
        static_cast<std::size_t>(m_ + k_));
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      const auto r = cells_[s].row;
      const auto c = m_ + cells_[s].col;
      adj[r].emplace_back(c, s);
      adj[c].emplace_back(r, s);
    }
    return adj;
  }

 private:
  Eigen::Index m_, k_;
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> basic_;
  std::vector<Cell> cells_;
};

Basis northwest_corner(const Vector& supply, const Vector& demand) {
  const Eigen::Index m = supply.size(), k = demand.size();
  Basis basis(m, k);
  Vector ra = supply, rb = demand;
  Eigen::Index i = 0, j = 0;
  for (;;) {
    const double x = std::min(ra(i), rb(j));
    basis.add({i, j, x});
    ra(i) -= x;
    rb(j) -= x;
    if (i == m - 1 && j == k - 1) break;
    if (i == m - 1) {
      ++j;
    } else if (j == k - 1) {
      ++i;
    } else if (ra(i) <= rb(j)) {
      ++i;
    } else {
      ++j;
    }
  }
  return basis;
}

}  // namespace

SimplexSolution solve_transportation(const Vector& supply, const Vector& demand,
                                     const Matrix& cost) {
  const Eigen::Index m = supply.size(), k = demand.size();
  if (cost.rows() != m || cost.cols() != k || m == 0 || k == 0)
    throw Error(ErrorCode::SolverFailure, "transportation problem shape mismatch");

  Basis basis = northwest_corner(supply, demand);
  const double scale = cost.cwiseAbs().maxCoeff();
  const double tol = 1e-13 * scale;
  const std::size_t max_pivots = static_cast<std::size_t>(50 * m * k + 1000);

  Vector u(m), v(k);
  std::vector<Eigen::Index> parent_node(static_cast<std::size_t>(m + k));
  std::vector<std::size_t> parent_slot(static_cast<std::size_t>(m + k));
  std::vector<char> seen(static_cast<std::size_t>(m + k));

  bool bland = false;
  std::size_t degenerate_run = 0;
  std::size_t pivots = 0;
  for (;; ++pivots) {
    if (pivots > max_pivots)
      throw Error(ErrorCode::SolverFailure,
                  "transportation simplex exceeded " + std::to_string(max_pivots) + " pivots");

    const auto adj = basis.adjacency();

    // Potentials: u_i + v_j = c_ij on basic cells, u_0 = 0.
    std::fill(seen.begin(), seen.end(), 0);
    std::queue<Eigen::Index> queue;
    queue.push(0);
    seen[0] = 1;
    u(0) = 0.0;
    while (!queue.empty()) {
      const auto node = queue.front();
      queue.pop();
      for (const auto& [next, slot] : adj[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        const auto& c = basis.cells()[slot];
        if (next >= m)
          v(next - m) = cost(c.row, c.col) - u(c.row);
        else
          u(next) = cost(c.row, c.col) - v(c.col);
        queue.push(next);
      }
    }

    // Pricing.
    Eigen::Index ei = -1, ej = -1;
    double best = -tol;
    for (Eigen::Index i = 0; i < m && !(bland && ei >= 0); ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        if (basis.is_basic(i, j)) continue;
        const double r = cost(i, j) - u(i) - v(j);
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei < 0) break;

    // Tree path from row ei to column ej closes the cycle.
    std::fill(seen.begin(), seen.end(), 0);
    queue = {};
    queue.push(ei);
    seen[ei] = 1;
    const Eigen::Index goal = m + ej;
    while (!queue.empty() && !seen[goal]) {
      const auto node = queue.front();
      queue.pop();
      for (const auto& [next, slot] : adj[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        parent_node[next] = node;
        parent_slot[next] = slot;
        queue.push(next);
      }
    }
    if (!seen[goal]) throw Error(ErrorCode::SolverFailure, "basis is not a spanning tree");

    // Walking back from column ej, edges alternate -, +, -, ..., -.
    std::vector<std::size_t> minus, plus;
    bool sign_minus = true;
    for (Eigen::Index node = goal; node != ei; node = parent_node[node]) {
      (sign_minus ? minus : plus).push_back(parent_slot[node]);
      sign_minus = !sign_minus;
    }

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = minus.front();
    for (const auto slot : minus) {
      const auto& c = basis.cells()[slot];
      const bool better = c.flow < theta;
      const bool tie_lower_index =
          bland && c.flow == theta &&
          c.row * k + c.col < basis.cells()[leaving].row * k + basis.cells()[leaving].col;
      if (better || tie_lower_index) {
        theta = c.flow;
        leaving = slot;
      }
    }
    theta = std::max(theta, 0.0);

    for (const auto slot : plus) basis.cells()[slot].flow += theta;
    for (const auto slot : minus)
      basis.cells()[slot].flow = std::max(0.0, basis.cells()[slot].flow - theta);
    basis.replace(leaving, {ei, ej, theta});

    if (theta == 0.0) {
      if (++degenerate_run > static_cast<std::size_t>(2 * (m + k))) bland = true;
    } else {
      degenerate_run = 0;
    }
  }

  SimplexSolution out;
  out.pivots = pivots;
  for (const auto& c : basis.cells())
    if (c.flow > 0.0) out.basis.push_back({c.row, c.col, c.flow});
  std::sort(out.basis.begin(), out.basis.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return out;
}

}  // namespace shapeot::detail
