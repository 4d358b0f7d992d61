#pragma once

#include <string_view>
#include <vector>

#include "shapeot/shapedist.hpp"

namespace shapeot {

// A curve in Wasserstein space sampled at increasing times in [0, 1].
class CurveSample {
 public:
  // Throws InvalidCurve (unsorted or out-of-range times, fewer than two
  // samples) or LengthMismatch.
  CurveSample(std::vector<double> times, std::vector<DiscreteMeasure> measures);

  const std::vector<double>& times() const { return times_; }
  const std::vector<DiscreteMeasure>& measures() const { return measures_; }
  std::size_t size() const { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<DiscreteMeasure> measures_;
};

std::vector<double> equispaced_times(std::size_t samples);

// Displacement interpolation through an exact optimal W_2 plan.
CurveSample geodesic_between(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::size_t samples);
CurveSample geodesic_between(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const std::vector<double>& times);

// (1 - t) mu + t nu as a mass mixture. Not a geodesic for disjoint supports.
CurveSample mass_mixing_curve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              std::size_t samples);

// max over sampled pairs of |W_p(mu_t, mu_s) - |t - s| W_p(mu_0, mu_1)| / W_p(mu_0, mu_1).
// Throws DegenerateEndpoints when W_p(mu_0, mu_1) = 0.
double constant_speed_check(const CurveSample& curve, double p = 2.0);

// W_2(mu_{i+1}, mu_{i-1}) / (t_{i+1} - t_{i-1}); throws BoundaryIndex at the ends.
double metric_derivative(const CurveSample& curve, std::size_t index);

enum class Verdict { geodesic_in_shape_space, not_geodesic, inconclusive };
std::string_view to_string(Verdict v);

struct QuotientEntry {
  double t;
  double s;
  double w_value;
  double d_value;
  double coefficient;  // W / D; NaN when undefined
  bool defined;
};

struct QuotientCoefficientReport {
  std::vector<QuotientEntry> grid;
  double max_relative_spread = 0.0;
  std::vector<std::pair<double, double>> undefined_pairs;
  Verdict verdict = Verdict::inconclusive;
  bool certified = false;  // D values come from the 2D oracle
};

struct QuotientOptions {
  double relative_tolerance = 1e-4;
  // Pairs with D <= threshold * (diameter of all atoms) count as undefined.
  double coincidence_threshold = 1e-7;
};

// W_2 and D_2 on all sampled pairs, C_ts = W/D. When shape_config has
// oracle_grid_steps > 0 and n = 2 the D values come from the grid oracle and
// the report is certified; otherwise they come from the alternating solver
// and a negative verdict is reported as inconclusive.
QuotientCoefficientReport quotient_coefficients(const CurveSample& curve,
                                                const ShapeSolverConfig& shape_config,
                                                const QuotientOptions& options = {});

enum class RampShape { linear, smoothstep };
enum class MixingReading { measure_mixture, point_interpolation };

// F(t) = 1 for t <= t0, then decreasing to 0 at t = 1. t0 = 1 gives F = 1.
struct SwitchFunction {
  double t0 = 0.5;
  RampShape shape = RampShape::linear;

  double operator()(double t) const;
};

// measure_mixture:     F(t) mu_t + (1 - F(t)) g#mu_t
// point_interpolation: (x -> F(t) x + (1 - F(t)) g(x))#mu_t
// Throws BadSwitchFunction for t0 outside [0, 1].
CurveSample mixing_curve(const CurveSample& curve, const Isometry& g, const SwitchFunction& f,
                         MixingReading reading = MixingReading::measure_mixture);

// g_t#mu_t sample by sample; throws LengthMismatch.
CurveSample branch_curve(const CurveSample& curve, const std::vector<Isometry>& gpath);

}  // namespace shapeot
