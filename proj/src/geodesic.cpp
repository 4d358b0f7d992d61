#include "shapeot/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shapeot {

CurveSample::CurveSample(std::vector<double> times, std::vector<DiscreteMeasure> measures)
    : times_(std::move(times)), measures_(std::move(measures)) {
  if (times_.size() != measures_.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(times_.size()) + " times but " +
                                               std::to_string(measures_.size()) + " measures");
  if (times_.size() < 2) throw Error(ErrorCode::InvalidCurve, "a curve needs at least two samples");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] >= 0.0 && times_[i] <= 1.0))
      throw Error(ErrorCode::InvalidCurve, "sample times must lie in [0, 1]");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw Error(ErrorCode::InvalidCurve, "sample times must be strictly increasing");
    if (measures_[i].dim() != measures_[0].dim())
      throw Error(ErrorCode::DimensionMismatch, "curve samples live in different dimensions");
  }
}

std::vector<double> equispaced_times(std::size_t samples) {
  if (samples < 2) throw Error(ErrorCode::InvalidCurve, "need at least two samples");
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i)
    t[i] = static_cast<double>(i) / static_cast<double>(samples - 1);
  t.back() = 1.0;
  return t;
}

CurveSample geodesic_between(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const std::vector<double>& times) {
  const auto plan = wasserstein_exact(mu, nu, 2.0);
  std::vector<DiscreteMeasure> ms;
  ms.reserve(times.size());
  for (const double t : times) ms.push_back(displacement_interpolation(plan.coupling, t));
  return CurveSample(times, std::move(ms));
}

CurveSample geodesic_between(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::size_t samples) {
  return geodesic_between(mu, nu, equispaced_times(samples));
}

CurveSample mass_mixing_curve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              std::size_t samples) {
  auto times = equispaced_times(samples);
  std::vector<DiscreteMeasure> ms;
  for (const double t : times) ms.push_back(mixture(mu, nu, t));
  return CurveSample(std::move(times), std::move(ms));
}

double constant_speed_check(const CurveSample& curve, double p) {
  const auto& ms = curve.measures();
  const auto& ts = curve.times();
  const double full = wasserstein_exact(ms.front(), ms.back(), p).distance;
  if (!(full > 0.0))
    throw Error(ErrorCode::DegenerateEndpoints, "curve endpoints coincide in W_p");
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      if (i == 0 && j == ms.size() - 1) continue;
      const double w = wasserstein_exact(ms[i], ms[j], p).distance;
      worst = std::max(worst, std::abs(w - (ts[j] - ts[i]) * full) / full);
    }
  }
  return worst;
}

double metric_derivative(const CurveSample& curve, std::size_t index) {
  if (index == 0 || index + 1 >= curve.size())
    throw Error(ErrorCode::BoundaryIndex, "metric derivative needs an interior sample");
  const auto& ms = curve.measures();
  const auto& ts = curve.times();
  return wasserstein_exact(ms[index + 1], ms[index - 1], 2.0).distance /
         (ts[index + 1] - ts[index - 1]);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::geodesic_in_shape_space: return "geodesic-in-shape-space";
    case Verdict::not_geodesic: return "not-geodesic";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

QuotientCoefficientReport quotient_coefficients(const CurveSample& curve,
                                                const ShapeSolverConfig& shape_config,
                                                const QuotientOptions& options) {
  const auto& ms = curve.measures();
  const auto& ts = curve.times();
  const auto n = ms.front().dim();
  const bool certified = shape_config.oracle_grid_steps > 0 && n == 2;

  Vector lo = ms.front().points().colwise().minCoeff();
  Vector hi = ms.front().points().colwise().maxCoeff();
  for (const auto& m : ms) {
    lo = lo.cwiseMin(Vector(m.points().colwise().minCoeff().transpose()));
    hi = hi.cwiseMax(Vector(m.points().colwise().maxCoeff().transpose()));
  }
  const double threshold = options.coincidence_threshold * (hi - lo).norm();

  ShapeSolverConfig solver_config = shape_config;
  solver_config.p = 2.0;
  solver_config.oracle_grid_steps = 0;

  QuotientCoefficientReport report;
  report.certified = certified;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double w = wasserstein_exact(ms[i], ms[j], 2.0).distance;
      double d = certified ? shape_distance_oracle_2d(ms[i], ms[j], shape_config.oracle_grid_steps)
                                 .distance
                           : shape_distance(ms[i], ms[j], solver_config).distance;
      // The identity is always a candidate, so D <= W up to roundoff.
      d = std::min(d, w);
      QuotientEntry e{ts[i], ts[j], w, d, std::numeric_limits<double>::quiet_NaN(),
                      d > threshold};
      if (e.defined) e.coefficient = w / d;
      else report.undefined_pairs.emplace_back(ts[i], ts[j]);
      report.grid.push_back(e);
    }
  }

  const QuotientEntry* endpoints = nullptr;
  double c_min = std::numeric_limits<double>::infinity(), c_max = 0.0;
  for (const auto& e : report.grid) {
    if (e.t == ts.front() && e.s == ts.back()) endpoints = &e;
    if (!e.defined) continue;
    c_min = std::min(c_min, e.coefficient);
    c_max = std::max(c_max, e.coefficient);
  }
  const bool any_defined = std::isfinite(c_min);
  if (!any_defined) {
    report.max_relative_spread = 0.0;
    report.verdict = Verdict::inconclusive;
    return report;
  }
  if (endpoints != nullptr && endpoints->defined) {
    const double ref = endpoints->coefficient;
    for (const auto& e : report.grid)
      if (e.defined)
        report.max_relative_spread =
            std::max(report.max_relative_spread, std::abs(e.coefficient - ref) / ref);
  } else {
    report.max_relative_spread = (c_max - c_min) / c_min;
  }

  const bool geodesic = endpoints != nullptr && endpoints->defined &&
                        report.undefined_pairs.empty() &&
                        report.max_relative_spread <= options.relative_tolerance;
  if (geodesic)
    report.verdict = Verdict::geodesic_in_shape_space;
  else
    report.verdict = certified ? Verdict::not_geodesic : Verdict::inconclusive;
  return report;
}

double SwitchFunction::operator()(double t) const {
  if (t <= t0 || t0 >= 1.0) return 1.0;
  const double s = std::clamp((t - t0) / (1.0 - t0), 0.0, 1.0);
  if (shape == RampShape::linear) return 1.0 - s;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

CurveSample mixing_curve(const CurveSample& curve, const Isometry& g, const SwitchFunction& f,
                         MixingReading reading) {
  if (!(f.t0 >= 0.0 && f.t0 <= 1.0))
    throw Error(ErrorCode::BadSwitchFunction, "switch time t0 must lie in [0, 1]");
  std::vector<DiscreteMeasure> out;
  out.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& mu = curve.measures()[i];
    const double ft = f(curve.times()[i]);
    if (ft >= 1.0) {
      out.push_back(mu);
    } else if (reading == MixingReading::measure_mixture) {
      out.push_back(mixture(mu, pushforward(mu, g), 1.0 - ft));
    } else {
      out.push_back(pushforward(mu, [&](const Vector& x) -> Vector {
        return ft * x + (1.0 - ft) * g.apply(x);
      }));
    }
  }
  return CurveSample(curve.times(), std::move(out));
}

CurveSample branch_curve(const CurveSample& curve, const std::vector<Isometry>& gpath) {
  if (gpath.size() != curve.size())
    throw Error(ErrorCode::LengthMismatch, "isometry path length differs from the curve");
  std::vector<DiscreteMeasure> out;
  out.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i)
    out.push_back(pushforward(curve.measures()[i], gpath[i]));
  return CurveSample(curve.times(), std::move(out));
}

}  // namespace shapeot
