#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shapeot/geodesic.hpp"
#include "shapeot/isometry.hpp"

namespace shapeot::fixtures {

// Seeded corpus shared by the `fixtures` subcommand and the acceptance suite.

struct OrbitPair {
  DiscreteMeasure mu;
  DiscreteMeasure nu;  // g#mu
  Isometry g;
};

// Random mu with m atoms in R^n and nu = g#mu for g on the given component.
OrbitPair orbit_pair(std::uint64_t seed, Eigen::Index m, Eigen::Index n,
                     OrthogonalComponent component);

// Gaussian atoms with weights in [0.1, 1].
DiscreteMeasure random_measure(std::uint64_t seed, Eigen::Index m, Eigen::Index n);
DiscreteMeasure random_uniform_measure(std::uint64_t seed, Eigen::Index m, Eigen::Index n);

// Geodesic in W_2 between 2D measures after moving the first onto its
// oracle-optimal position, so D = W at the endpoints.
CurveSample aligned_geodesic(std::uint64_t seed, Eigen::Index atoms, std::size_t samples,
                             std::size_t oracle_grid);

// (1 - t) delta_0 + t delta_e1 in the plane.
CurveSample mass_mixing(std::size_t samples);

struct BranchFixture {
  CurveSample base;
  CurveSample branched;
  std::vector<Isometry> gpath;
};

// Geodesic between random 2D measures, rotated about the origin by an angle
// ramping from 0 at t = 0.5 to pi/2 at t = 1.
BranchFixture branch(std::uint64_t seed, Eigen::Index atoms, std::size_t samples);

// Writes the corpus as JSON files into dir and returns the file names.
std::vector<std::string> write_corpus(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace shapeot::fixtures
