#include "fixtures.hpp"

#include <numbers>
#include <random>

#include "shapeot/io.hpp"

namespace shapeot::fixtures {
namespace {

Matrix gaussian_points(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Matrix pts(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) pts(i, j) = normal(rng);
  return pts;
}

}  // namespace

DiscreteMeasure random_measure(std::uint64_t seed, Eigen::Index m, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  Matrix pts = gaussian_points(rng, m, n);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  Vector weights(m);
  for (Eigen::Index i = 0; i < m; ++i) weights(i) = w(rng);
  return make_measure(std::move(pts), std::move(weights));
}

DiscreteMeasure random_uniform_measure(std::uint64_t seed, Eigen::Index m, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  return uniform_measure(gaussian_points(rng, m, n));
}

OrbitPair orbit_pair(std::uint64_t seed, Eigen::Index m, Eigen::Index n,
                     OrthogonalComponent component) {
  auto mu = random_measure(seed, m, n);
  auto g = random_isometry(n, seed ^ 0x5bd1e995ULL, component, 3.0);
  auto nu = pushforward(mu, g);
  return OrbitPair{std::move(mu), std::move(nu), std::move(g)};
}

CurveSample aligned_geodesic(std::uint64_t seed, Eigen::Index atoms, std::size_t samples,
                             std::size_t oracle_grid) {
  const auto mu = random_measure(seed, atoms, 2);
  const auto nu = random_measure(seed + 1, atoms, 2);
  const auto g = shape_distance_oracle_2d(mu, nu, oracle_grid).minimizer;
  return geodesic_between(pushforward(mu, g), nu, samples);
}

CurveSample mass_mixing(std::size_t samples) {
  return mass_mixing_curve(dirac(Vector::Zero(2)), dirac(Vector::Unit(2, 0)), samples);
}

BranchFixture branch(std::uint64_t seed, Eigen::Index atoms, std::size_t samples) {
  auto base = geodesic_between(random_measure(seed, atoms, 2),
                               random_measure(seed + 1, atoms, 2), samples);
  std::vector<Isometry> gpath;
  for (const double t : base.times()) {
    const double theta = t <= 0.5 ? 0.0 : (t - 0.5) / 0.5 * (std::numbers::pi / 2.0);
    gpath.emplace_back(planar_orthogonal(theta, false), Vector::Zero(2));
  }
  auto branched = branch_curve(base, gpath);
  return BranchFixture{std::move(base), std::move(branched), std::move(gpath)};
}

std::vector<std::string> write_corpus(const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  auto put = [&](const std::string& name, const io::Json& j) {
    io::write_text_file(dir / name, io::dump(j));
    names.push_back(name);
  };

  put("dirac_r3.json", io::to_json(dirac((Vector(3) << 1.0, -2.0, 0.5).finished())));
  put("dirac_r3_other.json", io::to_json(dirac((Vector(3) << 4.0, 0.0, -1.0).finished())));

  Matrix line_a(2, 1), line_b(2, 1);
  line_a << 0, 1;
  line_b << 0, 2;
  put("line_a.json", io::to_json(uniform_measure(line_a)));
  put("line_b.json", io::to_json(uniform_measure(line_b)));

  Matrix seg_a(2, 2), seg_b(2, 2);
  seg_a << 0, 0, 1, 0;
  seg_b << 0, 0, 0, 2;
  put("segment_a.json", io::to_json(uniform_measure(seg_a)));
  put("segment_b.json", io::to_json(uniform_measure(seg_b)));

  const auto orbit = orbit_pair(seed, 8, 2, OrthogonalComponent::either);
  put("orbit_mu.json", io::to_json(orbit.mu));
  put("orbit_nu.json", io::to_json(orbit.nu));
  put("orbit_g.json", io::to_json(orbit.g));

  put("generic5_r2.json", io::to_json(random_measure(seed + 10, 5, 2)));
  put("random_a.json", io::to_json(random_measure(seed + 20, 6, 2)));
  put("random_b.json", io::to_json(random_measure(seed + 21, 7, 2)));

  put("aligned_curve.json", io::to_json(aligned_geodesic(seed + 30, 4, 5, 360)));
  put("mixing_curve.json", io::to_json(mass_mixing(101)));
  put("branch_curve.json", io::to_json(branch(seed + 40, 4, 9).branched));

  const auto basis = killing_basis(2);
  put("algebra_m12.json", io::to_json(basis[2]));
  put("algebra_translation.json",
      io::to_json(IsoAlgebraElement(Matrix::Zero(2, 2), (Vector(2) << 1.0, 0.5).finished())));
  put("algebra_zero.json", io::to_json(IsoAlgebraElement::zero(2)));
  return names;
}

}  // namespace shapeot::fixtures
