#include <doctest.h>

#include <cmath>

#include "shapeot/isometry.hpp"
#include "shapeot/transport.hpp"
#include "test_support.hpp"

using namespace shapeot;
using testing::random_measure;
using testing::random_uniform_measure;

namespace {

Matrix col(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

void check_admissible(const Coupling& c) {
  CHECK((c.row_sums() - c.source().weights()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((c.col_sums() - c.target().weights()).cwiseAbs().maxCoeff() <= 1e-9);
  for (const auto& e : c.nonzeros()) CHECK(e.weight >= 0.0);
}

// Measure with integer masses k_i / L expanded into L uniform atoms.
DiscreteMeasure expand(const Matrix& pts, const std::vector<int>& counts) {
  int total = 0;
  for (int c : counts) total += c;
  Matrix out(total, pts.cols());
  int r = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (int c = 0; c < counts[i]; ++c) out.row(r++) = pts.row(static_cast<Eigen::Index>(i));
  return uniform_measure(out);
}

DiscreteMeasure with_counts(const Matrix& pts, const std::vector<int>& counts) {
  Vector w(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) w(static_cast<Eigen::Index>(i)) = counts[i];
  return make_measure(pts, w);
}

}  // namespace

TEST_CASE("Dirac to Dirac costs the ground distance for every p") {
  Vector x(2), y(2);
  x << 0.5, -1.0;
  y << 3.0, 2.0;
  for (const double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto r = wasserstein_exact(dirac(x), dirac(y), p);
    CHECK(r.distance == doctest::Approx((x - y).norm()).epsilon(1e-14));
    CHECK(std::abs(r.distance - std::pow(r.cost, 1.0 / p)) <= 1e-12 * r.distance);
  }
}

TEST_CASE("two-atom line instance matches the two-matching brute force") {
  // Matchings: identity 0.5*0 + 0.5*|1-2|^p, crossing 0.5*2^p + 0.5*1.
  // p = 1: min(0.5, 1.5) = 0.5; p = 2: min(0.5, 2.5) = 0.5.
  const auto mu = uniform_measure(col({0, 1}));
  const auto nu = uniform_measure(col({0, 2}));
  const auto r1 = wasserstein_exact(mu, nu, 1.0);
  CHECK(r1.cost == doctest::Approx(0.5));
  CHECK(r1.distance == doctest::Approx(0.5));
  const auto r2 = wasserstein_exact(mu, nu, 2.0);
  CHECK(r2.cost == doctest::Approx(0.5));
  CHECK(r2.distance == doctest::Approx(1.0 / std::sqrt(2.0)));

  // Same instance through the simplex path (non-uniform input forces it).
  const auto mu3 = make_measure(col({0, 1, 5}), (Vector(3) << 1, 1, 0).finished());
  const auto r3 = wasserstein_exact(mu3, nu, 1.0);
  CHECK(r3.cost == doctest::Approx(0.5));
}

TEST_CASE("identical measures are at distance zero with a diagonal plan") {
  std::mt19937_64 rng(1);
  for (const double p : {1.0, 2.0, 2.5}) {
    const auto mu = random_measure(rng, 6, 2);
    const auto r = wasserstein_exact(mu, mu, p);
    CHECK(r.distance == 0.0);
    for (const auto& e : r.coupling.nonzeros()) CHECK(e.row == e.col);
    check_admissible(r.coupling);
  }
}

TEST_CASE("oracle preconditions") {
  std::mt19937_64 rng(2);
  const auto big = random_uniform_measure(rng, 9, 2);
  CHECK(code_of([&] { wasserstein_oracle(big, big, 2.0); }) == ErrorCode::OracleTooLarge);
  const auto skewed = random_measure(rng, 4, 2);
  CHECK(code_of([&] { wasserstein_oracle(skewed, skewed, 2.0); }) ==
        ErrorCode::NonUniformWeights);
  const auto u = random_uniform_measure(rng, 5, 2);
  CHECK(wasserstein_oracle(u, u, 1.0).distance == 0.0);
}

TEST_CASE("exact solver agrees with the permutation oracle and an independent brute force") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index m = 2 + trial % 7;
    const Eigen::Index n = 1 + trial % 3;
    const double p = trial % 2 ? 1.0 : 2.0;
    const auto mu = random_uniform_measure(rng, m, n);
    const auto nu = random_uniform_measure(rng, m, n);
    const auto exact = wasserstein_exact(mu, nu, p);
    const auto oracle = wasserstein_oracle(mu, nu, p);
    CHECK(std::abs(exact.cost - oracle.cost) <= 1e-9 * std::max(1.0, oracle.cost));
    CHECK(std::abs(exact.cost - testing::brute_force_cost(mu, nu, p)) <=
          1e-9 * std::max(1.0, oracle.cost));
    check_admissible(exact.coupling);
  }
}

TEST_CASE("transportation simplex matches brute force on integer-mass instances") {
  // Masses k_i / L with L <= 8 are uniform assignment problems after
  // splitting every atom into k_i copies.
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> mass(1, 3);
  int checked = 0;
  while (checked < 40) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng() % 3);
    std::vector<int> cm(m), ck(k);
    int sm = 0, sk = 0;
    for (auto& c : cm) sm += (c = mass(rng));
    for (auto& c : ck) sk += (c = mass(rng));
    if (sm != sk || sm > 8) continue;
    const Eigen::Index n = 1 + checked % 3;
    const Matrix pm = testing::random_points(rng, m, n);
    const Matrix pk = testing::random_points(rng, k, n);
    const double p = checked % 2 ? 1.0 : 2.0;
    const auto exact = wasserstein_exact(with_counts(pm, cm), with_counts(pk, ck), p);
    const double brute = testing::brute_force_cost(expand(pm, cm), expand(pk, ck), p);
    CHECK(exact.cost == doctest::Approx(brute).epsilon(1e-9));
    check_admissible(exact.coupling);
    ++checked;
  }
}

TEST_CASE("metric axioms, isometry invariance and the adjoint law") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : 1.5);
    const auto a = random_measure(rng, 5, n);
    const auto b = random_measure(rng, 4, n);
    const auto c = random_measure(rng, 6, n);
    const double ab = wasserstein_exact(a, b, p).distance;
    CHECK(std::abs(ab - wasserstein_exact(b, a, p).distance) <= 1e-9);
    CHECK(wasserstein_exact(a, c, p).distance <=
          ab + wasserstein_exact(b, c, p).distance + 1e-9);

    const auto g = testing::random_motion(rng, n);
    CHECK(std::abs(wasserstein_exact(pushforward(a, g), pushforward(b, g), p).distance - ab) <=
          1e-9);
    CHECK(std::abs(wasserstein_exact(pushforward(a, g), b, p).distance -
                   wasserstein_exact(a, pushforward(b, inverse(g)), p).distance) <= 1e-9);
    CHECK(std::abs(wasserstein_exact(embed(a, 2), embed(b, 2), p).distance - ab) <= 1e-9);
  }
}

TEST_CASE("displacement interpolation") {
  const auto d0 = dirac(Vector::Zero(1));
  const auto d2 = dirac(Vector::Constant(1, 2.0));
  const auto plan = wasserstein_exact(d0, d2, 2.0);
  const auto mid = displacement_interpolation(plan.coupling, 0.5);
  REQUIRE(mid.size() == 1);
  CHECK(mid.atom(0)(0) == doctest::Approx(1.0));
  CHECK(code_of([&] { displacement_interpolation(plan.coupling, 1.5); }) ==
        ErrorCode::TOutOfRange);

  std::mt19937_64 rng(23);
  const auto mu = random_measure(rng, 4, 2);
  const auto nu = random_measure(rng, 5, 2);
  const auto r = wasserstein_exact(mu, nu, 2.0);
  CHECK(atomwise_equal(consolidate(displacement_interpolation(r.coupling, 0.0)), mu, 1e-12));
  CHECK(atomwise_equal(consolidate(displacement_interpolation(r.coupling, 1.0)), nu, 1e-12));
  // Marginals agree to roundoff, so the cost (not its square root) is tiny.
  CHECK(wasserstein_exact(displacement_interpolation(r.coupling, 0.0), mu, 2.0).cost < 1e-14);

  // Constant speed along an optimal plan.
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_measure(rng, 5, 2);
    const auto b = random_measure(rng, 6, 2);
    const auto opt = wasserstein_exact(a, b, 2.0);
    for (const double t : {0.2, 0.5}) {
      for (const double s : {0.7, 1.0}) {
        const double w = wasserstein_exact(displacement_interpolation(opt.coupling, t),
                                           displacement_interpolation(opt.coupling, s), 2.0)
                             .distance;
        CHECK(std::abs(w - (s - t) * opt.distance) <= 1e-7 * opt.distance);
      }
    }
  }
}

TEST_CASE("entropic solver returns an admissible plan no better than the optimum") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 12; ++trial) {
    const auto mu = random_measure(rng, 6, 2);
    const auto nu = random_measure(rng, 7, 2);
    EntropicOptions opts;
    opts.epsilon = 1e-2;
    const auto ent = wasserstein_entropic(mu, nu, 2.0, opts);
    const auto ex = wasserstein_exact(mu, nu, 2.0);
    CHECK(ent.solver == SolverTag::entropic);
    CHECK(ent.coupling.marginal_residual() <= 1e-9);
    CHECK(ent.cost >= ex.cost - 1e-9);
    CHECK(ent.distance <= ex.distance + 10 * opts.epsilon * std::log(6.0 * 7.0));
    check_admissible(ent.coupling);

    const auto self = wasserstein_entropic(mu, mu, 2.0, opts);
    CHECK(self.distance <= 10 * opts.epsilon * std::log(36.0));
  }
}

TEST_CASE("entropic solver signals underflow and bad input") {
  std::mt19937_64 rng(31);
  const auto mu = random_measure(rng, 3, 2);
  const auto nu = random_measure(rng, 3, 2);
  EntropicOptions tiny;
  tiny.epsilon = 1e-310;
  CHECK(code_of([&] { wasserstein_entropic(mu, nu, 2.0, tiny); }) ==
        ErrorCode::NumericalUnderflow);
  CHECK(code_of([&] { wasserstein_entropic(mu, random_measure(rng, 3, 3), 2.0); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("sparse coupling storage behaves like the dense one") {
  const auto mu = uniform_measure(col({0, 1}));
  const auto nu = uniform_measure(col({0, 2}));
  const Coupling sparse(mu, nu, std::vector<CouplingEntry>{{1, 1, 0.5}, {0, 0, 0.5}});
  CHECK_FALSE(sparse.is_dense());
  const auto nz = sparse.nonzeros();
  REQUIRE(nz.size() == 2);
  CHECK(nz[0].row == 0);
  CHECK(sparse.cost(1.0) == doctest::Approx(0.5));
  CHECK(sparse.marginal_residual() <= 1e-15);
  CHECK(sparse.to_dense()(1, 1) == 0.5);
}

TEST_CASE("dimension mismatch is reported") {
  CHECK(code_of([] { wasserstein_exact(dirac(Vector::Zero(2)), dirac(Vector::Zero(3)), 2.0); }) ==
        ErrorCode::DimensionMismatch);
}
