#pragma once

// Global temperature response to a CO2 pulse, approximated by a sum of
// three exponentials in mK per GtC.

#include <array>
#include <cmath>
#include <string>

#include "gridscc/climate.hpp"
#include "gridscc/error.hpp"

namespace gridscc {

/// Tonnes of CO2 per tonne of carbon (molar mass ratio 44.01 / 12.011).
inline constexpr double kCo2PerCarbon = 44.01 / 12.011;
/// Tonnes of CO2 in one GtC.
inline constexpr double kTonnesCo2PerGtC = kCo2PerCarbon * 1e9;

struct PulseParams {
  std::array<double, 3> amplitude{-2.308, 0.743, -0.191};  // mK / GtC
  std::array<double, 3> tau{2.241, 35.750, 97.180};         // years
  int year = 2010;
  double size_gtc = 1.0;
};

inline void validate(const PulseParams& p) {
  for (double t : p.tau)
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidRange, "pulse time constants must be positive");
  if (!(p.size_gtc > 0.0)) throw Error(ErrorCode::InvalidRange, "pulse size must be positive");
}

/// Warming (degC) at a possibly fractional time `elapsed` years after the pulse.
inline double pulse_response(const PulseParams& p, double elapsed) {
  if (elapsed < 0.0) return 0.0;
  const double mk = -(p.amplitude[0] + p.amplitude[1] + p.amplitude[2]) +
                    p.amplitude[0] * std::exp(-elapsed / p.tau[0]) +
                    p.amplitude[1] * std::exp(-elapsed / p.tau[1]) +
                    p.amplitude[2] * std::exp(-elapsed / p.tau[2]);
  return mk * p.size_gtc * 1e-3;
}

/// Pulse-induced warming in `year`; zero before the pulse year.
inline double pulse_delta_t(const PulseParams& p, int year) {
  return pulse_response(p, static_cast<double>(year - p.year));
}

/// Base trajectory plus the pulse response; `response_scale` multiplies the
/// response (1 unless the response is tied to the sampled ECS).
inline GlobalTrajectory perturbed_trajectory(const GlobalTrajectory& base, const PulseParams& p,
                                             double response_scale = 1.0) {
  validate(p);
  if (!base.years.contains(p.year))
    throw Error(ErrorCode::PulseOutsideAxis, "pulse year " + std::to_string(p.year) + " outside [" +
                                                 std::to_string(base.years.first) + ", " +
                                                 std::to_string(base.years.last) + "]");
  GlobalTrajectory out = base;
  out.label = base.label + "+pulse";
  for (std::size_t i = 0; i < out.anomaly.size(); ++i) {
    const int year = out.years.year(i);
    if (year >= p.year) out.anomaly[i] += response_scale * pulse_delta_t(p, year);
  }
  return out;
}

}  // namespace gridscc
