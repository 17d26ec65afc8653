#pragma once

// Time-varying per-cluster user density: the diurnal "tidal" load that the
// elastic provisioner tracks.  Three profile shapes are supported: a cosine
// between trough and peak, piecewise-linear interpolation through knots, and
// a step table.  All profiles are 24-hour periodic; the piecewise shapes wrap
// their last knot around to the first.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cransim::traffic {

enum class ProfileKind { Sinusoid, PiecewiseLinear, Table };

struct Knot {
  double hour;     // in [0, 24)
  double density;  // users per m^2
};

struct DiurnalProfile {
  ProfileKind kind = ProfileKind::Sinusoid;
  // Sinusoid parameters.
  double lambda_peak = 0.0;    // per m^2
  double lambda_trough = 0.0;  // per m^2
  double peak_hour = 0.0;      // in [0, 24)
  // PiecewiseLinear / Table knots, sorted by hour, hours strictly increasing.
  std::vector<Knot> knots;
};

struct ClusterSpec {
  std::string id;
  double area_km2 = 0.0;
  double lambda_r = 0.0;  // deployed RRH density, per m^2
  DiurnalProfile profile;
};

inline void check_profile(const DiurnalProfile& p) {
  if (p.kind == ProfileKind::Sinusoid) {
    if (!(p.lambda_trough >= 0.0 && p.lambda_peak >= p.lambda_trough))
      throw std::domain_error("profile: need lambda_peak >= lambda_trough >= 0");
    if (!(p.peak_hour >= 0.0 && p.peak_hour < 24.0))
      throw std::domain_error("profile.peak_hour: must lie in [0,24)");
    return;
  }
  if (p.knots.empty())
    throw std::domain_error("profile.knots: at least one knot required");
  double prev = -1.0;
  for (const Knot& k : p.knots) {
    if (!(k.hour >= 0.0 && k.hour < 24.0))
      throw std::domain_error("profile.knots: hours must lie in [0,24)");
    if (!(k.hour > prev))
      throw std::domain_error("profile.knots: hours must be strictly increasing");
    if (!(k.density >= 0.0))
      throw std::domain_error("profile.knots: densities must be nonnegative");
    prev = k.hour;
  }
}

// User density (per m^2) at hour t of the day.
inline double user_density(const DiurnalProfile& p, double t_hours) {
  if (!(t_hours >= 0.0 && t_hours < 24.0))
    throw std::domain_error("user_density: t_hours must lie in [0,24)");
  switch (p.kind) {
    case ProfileKind::Sinusoid: {
      const double phase =
          2.0 * std::numbers::pi * (t_hours - p.peak_hour) / 24.0;
      return p.lambda_trough +
             (p.lambda_peak - p.lambda_trough) * (1.0 + std::cos(phase)) / 2.0;
    }
    case ProfileKind::PiecewiseLinear: {
      const auto& ks = p.knots;
      if (ks.size() == 1) return ks.front().density;
      // Locate the segment containing t, wrapping the day boundary: before
      // the first knot we sit on the segment from (last - 24h) to first;
      // after the last knot, on the segment from last to (first + 24h).
      double h0, d0, h1, d1;
      if (t_hours < ks.front().hour) {
        h0 = ks.back().hour - 24.0;
        d0 = ks.back().density;
        h1 = ks.front().hour;
        d1 = ks.front().density;
      } else if (t_hours >= ks.back().hour) {
        h0 = ks.back().hour;
        d0 = ks.back().density;
        h1 = ks.front().hour + 24.0;
        d1 = ks.front().density;
      } else {
        std::size_t j = 1;
        while (ks[j].hour <= t_hours) ++j;
        h0 = ks[j - 1].hour;
        d0 = ks[j - 1].density;
        h1 = ks[j].hour;
        d1 = ks[j].density;
      }
      return d0 + (d1 - d0) * (t_hours - h0) / (h1 - h0);
    }
    case ProfileKind::Table: {
      const auto& ks = p.knots;
      // Value of the most recent knot; before the first knot the previous
      // day's last knot still applies.
      if (t_hours < ks.front().hour) return ks.back().density;
      std::size_t j = 0;
      while (j + 1 < ks.size() && ks[j + 1].hour <= t_hours) ++j;
      return ks[j].density;
    }
  }
  throw std::logic_error("user_density: unhandled profile kind");
}

// Exact maximum of the profile over the day.  The sinusoid attains its peak
// at peak_hour; the piecewise shapes attain extrema at knots.
inline double peak_density(const DiurnalProfile& p) {
  if (p.kind == ProfileKind::Sinusoid) return p.lambda_peak;
  double best = 0.0;
  for (const Knot& k : p.knots) best = std::max(best, k.density);
  return best;
}

}  // namespace cransim::traffic
