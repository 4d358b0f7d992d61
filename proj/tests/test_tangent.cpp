#include <doctest.h>

#include <cmath>

#include "shapeot/tangent.hpp"
#include "test_support.hpp"

using namespace shapeot;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

IsoAlgebraElement random_element(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector c(iso_dimension(n));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return from_coordinates(c, n);
}

DiscreteVectorField random_field(std::mt19937_64& rng, const DiscreteMeasure& mu) {
  return DiscreteVectorField(mu, testing::random_points(rng, mu.size(), mu.dim()));
}

const std::vector<double> kGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

}  // namespace

TEST_CASE("L2 inner product") {
  Matrix pts(2, 2);
  pts << 0, 0, 1, 0;
  const auto mu = uniform_measure(pts);
  CHECK(l2_inner(DiscreteVectorField::zero(mu), DiscreteVectorField::zero(mu)) == 0.0);
  Matrix v(2, 2);
  v << 1, 0, -1, 0;
  const DiscreteVectorField f(mu, v);
  CHECK(l2_inner(f, f) == doctest::Approx(1.0));
  CHECK(f.norm() == doctest::Approx(1.0));

  const auto d = dirac(Vector::Zero(3));
  const DiscreteVectorField e1(d, Vector::Unit(3, 0).transpose());
  CHECK(l2_inner(e1, e1) == 1.0);

  const auto other = uniform_measure((Matrix(2, 2) << 0, 0, 2, 0).finished());
  CHECK(code_of([&] { l2_inner(f, DiscreteVectorField::zero(other)); }) ==
        ErrorCode::MeasureMismatch);
  CHECK(code_of([&] { DiscreteVectorField(mu, Matrix::Zero(3, 2)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("Dirac orbit subspaces") {
  for (Eigen::Index n = 2; n <= 4; ++n) {
    const auto report = orbit_subspace(dirac(Vector::LinSpaced(n, 0.5, 2.0)));
    CHECK(report.rank == n);
    CHECK(report.shape_tangent_dim == 0);
    CHECK(report.kernel_basis.size() == static_cast<std::size_t>(n * (n - 1) / 2));
    CHECK(report.rank + static_cast<Eigen::Index>(report.kernel_basis.size()) ==
          iso_dimension(n));
  }
}

TEST_CASE("two atoms in the plane") {
  Matrix pts(2, 2);
  pts << 0, 0, 1, 0;
  const auto report = orbit_subspace(uniform_measure(pts));
  // Hand-built columns: P1 -> -(1,0,1,0), P2 -> -(0,1,0,1), M12 -> -(0,0,0,1),
  // all times sqrt(1/2).
  Matrix expected(4, 3);
  expected << -1, 0, 0, 0, -1, 0, -1, 0, 0, 0, -1, -1;
  expected *= std::sqrt(0.5);
  CHECK((report.evaluation_matrix - expected).norm() <= 1e-15);
  CHECK(report.rank == 3);
  CHECK(report.shape_tangent_dim == 1);
  CHECK(report.kernel_basis.empty());
}

TEST_CASE("generic configurations reach dim iso(n)") {
  std::mt19937_64 rng(1);
  for (Eigen::Index n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto mu = testing::random_measure(rng, n + 1, n);
      const auto report = orbit_subspace(mu);
      CHECK(report.rank == iso_dimension(n));
      CHECK(report.shape_tangent_dim == (n + 1) * n - iso_dimension(n));
    }
  }
}

TEST_CASE("kernel elements vanish on the support") {
  std::mt19937_64 rng(2);
  // Collinear atoms in R^3: rotations about the line vanish.
  Matrix pts(3, 3);
  pts << 0, 0, 0, 1, 1, 1, 2, 2, 2;
  pts.rowwise() += Vector::Constant(3, 0.3).transpose();
  const auto line = orbit_subspace(uniform_measure(pts));
  CHECK(line.rank == 5);
  REQUIRE(line.kernel_basis.size() == 1);
  for (Eigen::Index k = 0; k < 3; ++k)
    CHECK(fundamental_field(line.kernel_basis[0], pts.row(k).transpose()).norm() <= 1e-9);

  // Re-indexing and translation leave rank and dimensions unchanged.
  const auto mu = testing::random_measure(rng, 4, 3);
  const auto base = orbit_subspace(mu);
  Matrix perm = mu.points().colwise().reverse();
  Vector w = mu.weights().reverse();
  const auto shuffled = orbit_subspace(make_measure(perm, w));
  const auto moved = orbit_subspace(pushforward(mu, Isometry::translation(Vector::Constant(3, 5.0))));
  CHECK(shuffled.rank == base.rank);
  CHECK(moved.rank == base.rank);
  CHECK(moved.shape_tangent_dim == base.shape_tangent_dim);
}

TEST_CASE("orbit projection") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + trial % 2;
    const auto mu = testing::random_measure(rng, 4, n);
    const auto report = orbit_subspace(mu);

    const auto x = random_element(rng, n);
    const auto fx = DiscreteVectorField::fundamental(mu, x);
    const auto split_x = project_onto_orbit(fx, report);
    CHECK(split_x.shape.norm() <= 1e-9 * fx.norm());
    CHECK((split_x.generator.coordinates() - x.coordinates()).norm() <= 1e-8);

    const auto v = random_field(rng, mu);
    const auto split = project_onto_orbit(v, report);
    CHECK((split.orbit + split.shape - v).norm() <= 1e-12);
    CHECK(std::abs(l2_inner(split.orbit, split.shape)) <= 1e-10 * l2_inner(v, v));
    const auto again = project_onto_orbit(split.orbit, report);
    CHECK((again.orbit - split.orbit).norm() <= 1e-10 * v.norm());
    CHECK((DiscreteVectorField::fundamental(mu, split.generator) - split.orbit).norm() <= 1e-10);

    // Self-adjointness: <P u, v> = <u, P v>.
    const auto u = random_field(rng, mu);
    const auto pu = project_onto_orbit(u, report).orbit;
    CHECK(std::abs(l2_inner(pu, v) - l2_inner(u, split.orbit)) <= 1e-10);

    // A field orthogonal to every column: build it from the left null space
    // of the evaluation matrix.
    Eigen::JacobiSVD<Matrix> svd(report.evaluation_matrix, Eigen::ComputeFullU);
    const Vector z = svd.matrixU().col(svd.matrixU().cols() - 1);
    Matrix vec(mu.size(), n);
    for (Eigen::Index k = 0; k < mu.size(); ++k)
      vec.row(k) = z.segment(k * n, n).transpose() / std::sqrt(mu.weight(k));
    const auto perp = project_onto_orbit(DiscreteVectorField(mu, vec), report);
    CHECK(perp.orbit.norm() <= 1e-10);
  }
  const auto mu = dirac(Vector::Zero(2));
  const auto zero = project_onto_orbit(DiscreteVectorField::zero(mu), orbit_subspace(mu));
  CHECK(zero.orbit.norm() == 0.0);
  CHECK(zero.shape.norm() == 0.0);
}

TEST_CASE("continuity residual") {
  std::mt19937_64 rng(4);
  const auto mu = testing::random_measure(rng, 5, 2);
  const auto quad = TestFunction::quadratic(
      0.5, (Vector(2) << 1.0, -0.5).finished(), (Matrix(2, 2) << 2.0, 0.3, 0.3, -1.0).finished());
  const auto bump = TestFunction::gaussian((Vector(2) << 0.2, 0.1).finished(), 0.8);

  CHECK(continuity_residual(mu, IsoAlgebraElement::zero(2), bump, kGrid, 1e-3) <= 1e-14);
  CHECK(continuity_residual(mu, killing_basis(2)[0], quad, kGrid, 1e-4) <= 1e-10);
  CHECK(code_of([&] { continuity_residual(mu, killing_basis(2)[0], quad, kGrid, 0.0); }) ==
        ErrorCode::BadStep);

  // Second-order decay under step halving.
  const auto m12 = killing_basis(2)[2];
  std::vector<double> hs{0.08, 0.04, 0.02}, rs;
  for (double h : hs) rs.push_back(continuity_residual(mu, m12, bump, kGrid, h));
  CHECK(rs[0] / rs[1] == doctest::Approx(4.0).epsilon(0.1));
  const double slope = std::log(rs[0] / rs[2]) / std::log(hs[0] / hs[2]);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("norm invariance along Killing flows") {
  std::mt19937_64 rng(5);
  const IsoAlgebraElement shift(Matrix::Zero(2, 2), (Vector(2) << 0.6, 0.8).finished());
  const auto mu = testing::random_measure(rng, 4, 2);
  CHECK(flow_norm_invariance(mu, shift, kGrid) == 0.0);
  CHECK(DiscreteVectorField::fundamental(mu, shift).norm() == doctest::Approx(1.0));
  CHECK(l1_in_time_norm(mu, shift, 10) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l1_in_time_norm(mu, IsoAlgebraElement::zero(2), 10) == 0.0);

  Matrix circle(8, 2);
  for (Eigen::Index k = 0; k < 8; ++k)
    circle.row(k) << std::cos(0.7 * k), std::sin(0.7 * k);
  CHECK(flow_norm_invariance(uniform_measure(circle), killing_basis(2)[2], kGrid) <= 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const auto m = testing::random_measure(rng, 5, n);
    const auto x = random_element(rng, n);
    CHECK(flow_norm_invariance(m, x, kGrid) <= 1e-10);
    CHECK(std::abs(l1_in_time_norm(m, x, 16) - DiscreteVectorField::fundamental(m, x).norm()) <=
          1e-9);
  }
  // Series path.
  const auto m5 = testing::random_measure(rng, 6, 5);
  CHECK(flow_norm_invariance(m5, random_element(rng, 5), kGrid) <= 1e-8);
}

TEST_CASE("representative independence") {
  std::mt19937_64 rng(6);
  const auto mu = testing::random_measure(rng, 5, 2);
  const auto id = representative_independence_check(mu, Isometry::identity(2));
  CHECK(id.discrepancy <= 1e-14);

  const auto d = dirac(Vector::Constant(3, 1.0));
  const auto dc = representative_independence_check(d, random_isometry(3, 3));
  CHECK(dc.rank_mu == 3);
  CHECK(dc.rank_gmu == 3);
  CHECK(dc.shape_dim_mu == 0);
  CHECK(dc.shape_dim_gmu == 0);

  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + trial % 2;
    const auto m = testing::random_measure(rng, 5, n);
    const auto check =
        representative_independence_check(m, testing::random_motion(rng, n), rng());
    CHECK(check.discrepancy <= 1e-9);
    CHECK(check.rank_mu == check.rank_gmu);
    CHECK(check.shape_dim_mu == check.shape_dim_gmu);
  }
}
