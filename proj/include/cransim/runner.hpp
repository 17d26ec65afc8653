#pragma once

// Scenario executor: replays one simulated day per cluster under the elastic
// provisioning scheme and the peak-provisioned static baseline, produces the
// per-timestep power time series, window summaries, deterministic CSV output,
// an optional gnuplot script, and the Monte Carlo validation report that
// arbitrates the two interference-kernel variants.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cransim/geometry.hpp"
#include "cransim/provision.hpp"
#include "cransim/scenario.hpp"

namespace cransim::runner {

struct TimeSeriesRow {
  double time_hours = 0.0;
  std::string cluster_id;
  Scheme scheme = Scheme::Elastic;  // Elastic or Static, never Both
  double lambda_u_per_km2 = 0.0;
  double mu_a = 0.0;
  double lambda_active_per_km2 = 0.0;
  double tx_power_w = 0.0;
  int n_cores = 1;
  double area_power_w = 0.0;  // density integrated over the cluster area
  double vm_power_w = 0.0;
  double total_power_w = 0.0;
  bool feasible = true;
};

struct SchemeStats {
  bool present = false;
  double energy_wh = 0.0;      // trapezoidal daily energy
  double peak_mean_w = 0.0;    // mean power over the peak window
  double offpeak_mean_w = 0.0;
};

struct ClusterComparison {
  std::string cluster_id;
  SchemeStats elastic;
  SchemeStats static_scheme;
  bool comparable = false;  // both schemes present with positive static power
  double energy_reduction_pct = 0.0;   // (static - elastic) / static * 100
  double peak_reduction_pct = 0.0;
  double offpeak_reduction_pct = 0.0;
};

struct DaySummary {
  double peak_window_begin = 8.0;
  double peak_window_end = 19.0;
  std::vector<ClusterComparison> clusters;
};

namespace detail {

// Effective power parameters for per-cluster accounting: an OLT shared by the
// whole pool is split evenly across clusters when the scenario says so.
inline power::PowerParams effective_power(const Scenario& sc) {
  power::PowerParams pp = sc.power;
  if (sc.shared_olt && !sc.clusters.empty())
    pp.transport.p_olt /= static_cast<double>(sc.clusters.size());
  return pp;
}

inline TimeSeriesRow make_row(double t_hours, const traffic::ClusterSpec& cl,
                              Scheme scheme, double lambda_u,
                              const provision::ProvisioningDecision& d,
                              double utilization,
                              const power::PowerParams& pp) {
  TimeSeriesRow row;
  row.time_hours = t_hours;
  row.cluster_id = cl.id;
  row.scheme = scheme;
  row.lambda_u_per_km2 = lambda_u * 1e6;
  row.mu_a = d.mu_a;
  row.lambda_active_per_km2 = d.mu_a * cl.lambda_r * 1e6;
  row.tx_power_w = d.tx_power;
  row.n_cores = d.n_cores;
  const double density =
      power::area_power(cl.lambda_r, d.mu_a, d.tx_power, pp.rrh, pp.transport);
  row.area_power_w = density * cl.area_km2 * 1e6;
  row.vm_power_w = power::vm_power(d.n_cores, utilization, pp.vm, pp.transport);
  row.total_power_w = row.area_power_w + row.vm_power_w;
  row.feasible = d.feasible;
  return row;
}

inline std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

// Replay one day under one scheme.  Elastic re-provisions every timestep from
// the instantaneous user density; static holds the peak-density decision (and
// its pool utilization) all day.  Rows are ordered time-major, then by the
// cluster order of the scenario.
inline std::vector<TimeSeriesRow> run_day(const Scenario& sc, Scheme scheme,
                                          int timestep_minutes) {
  if (scheme == Scheme::Both)
    throw std::invalid_argument("run_day: scheme must be Elastic or Static");
  if (timestep_minutes < 1 || 1440 % timestep_minutes != 0)
    throw std::domain_error("run_day: timestep must divide the 1440-minute day evenly");

  const power::PowerParams pp = detail::effective_power(sc);
  const int steps = 1440 / timestep_minutes;

  // Static decisions are frozen at each cluster's daily peak.
  std::vector<provision::ProvisioningDecision> static_decisions;
  std::vector<double> static_utilization;
  if (scheme == Scheme::Static) {
    for (const auto& cl : sc.clusters) {
      const provision::ClusterState st{cl.lambda_r,
                                       traffic::peak_density(cl.profile),
                                       cl.area_km2 * 1e6};
      const auto d = provision::closed_form_provision(sc.radio, st,
                                                      sc.constraints, pp,
                                                      sc.run.kernel);
      static_decisions.push_back(d);
      static_utilization.push_back(
          st.lambda_u > 0.0
              ? power::vm_utilization(sc.constraints.n_prb,
                                      sc.constraints.deadline_us, d.n_cores,
                                      pp.vm)
              : 0.0);
    }
  }

  std::vector<TimeSeriesRow> rows;
  rows.reserve(static_cast<std::size_t>(steps) * sc.clusters.size());
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * timestep_minutes / 60.0;
    for (std::size_t ci = 0; ci < sc.clusters.size(); ++ci) {
      const auto& cl = sc.clusters[ci];
      const double lambda_u = traffic::user_density(cl.profile, t);
      if (scheme == Scheme::Static) {
        rows.push_back(detail::make_row(t, cl, scheme, lambda_u,
                                        static_decisions[ci],
                                        static_utilization[ci], pp));
      } else {
        const provision::ClusterState st{cl.lambda_r, lambda_u,
                                         cl.area_km2 * 1e6};
        const auto d = provision::closed_form_provision(sc.radio, st,
                                                        sc.constraints, pp,
                                                        sc.run.kernel);
        const double u =
            lambda_u > 0.0
                ? power::vm_utilization(sc.constraints.n_prb,
                                        sc.constraints.deadline_us, d.n_cores,
                                        pp.vm)
                : 0.0;
        rows.push_back(detail::make_row(t, cl, scheme, lambda_u, d, u, pp));
      }
    }
  }
  return rows;
}

// Run the scheme(s) requested and order rows by (time, cluster id, scheme),
// the CSV row-order contract.
inline std::vector<TimeSeriesRow> run_timeseries(const Scenario& sc,
                                                 Scheme scheme,
                                                 int timestep_minutes) {
  std::vector<TimeSeriesRow> rows;
  if (scheme == Scheme::Both) {
    rows = run_day(sc, Scheme::Elastic, timestep_minutes);
    const auto stat = run_day(sc, Scheme::Static, timestep_minutes);
    rows.insert(rows.end(), stat.begin(), stat.end());
  } else {
    rows = run_day(sc, scheme, timestep_minutes);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TimeSeriesRow& a, const TimeSeriesRow& b) {
                     if (a.time_hours != b.time_hours)
                       return a.time_hours < b.time_hours;
                     if (a.cluster_id != b.cluster_id)
                       return a.cluster_id < b.cluster_id;
                     return a.scheme == Scheme::Elastic &&
                            b.scheme == Scheme::Static;
                   });
  return rows;
}

// Daily energy (trapezoid with 24-hour wraparound) and window mean powers per
// cluster and scheme, plus elastic-vs-static percentage reductions.
inline DaySummary summarize(const std::vector<TimeSeriesRow>& rows,
                            double peak_begin = 8.0, double peak_end = 19.0) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  DaySummary summary;
  summary.peak_window_begin = peak_begin;
  summary.peak_window_end = peak_end;

  auto cluster_index = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < summary.clusters.size(); ++i)
      if (summary.clusters[i].cluster_id == id) return i;
    summary.clusters.push_back({});
    summary.clusters.back().cluster_id = id;
    return summary.clusters.size() - 1;
  };

  struct Series {
    std::vector<double> t, p;
  };
  std::vector<std::array<Series, 2>> data;  // [cluster][scheme]
  for (const auto& row : rows) {
    const std::size_t ci = cluster_index(row.cluster_id);
    if (data.size() <= ci) data.resize(ci + 1);
    auto& s = data[ci][row.scheme == Scheme::Elastic ? 0 : 1];
    s.t.push_back(row.time_hours);
    s.p.push_back(row.total_power_w);
  }

  for (std::size_t ci = 0; ci < summary.clusters.size(); ++ci) {
    for (int si = 0; si < 2; ++si) {
      const Series& s = data[ci][si];
      SchemeStats stats;
      if (s.t.empty()) {
        (si == 0 ? summary.clusters[ci].elastic
                 : summary.clusters[ci].static_scheme) = stats;
        continue;
      }
      stats.present = true;
      // trapezoid over the sampled day, closing the 24 h period back onto
      // the first sample
      double energy = 0.0;
      for (std::size_t i = 0; i + 1 < s.t.size(); ++i)
        energy += 0.5 * (s.p[i] + s.p[i + 1]) * (s.t[i + 1] - s.t[i]);
      energy += 0.5 * (s.p.back() + s.p.front()) * (24.0 - s.t.back() + s.t.front());
      stats.energy_wh = energy;
      double peak_sum = 0.0, off_sum = 0.0;
      std::size_t peak_n = 0, off_n = 0;
      for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] >= peak_begin && s.t[i] < peak_end) {
          peak_sum += s.p[i];
          ++peak_n;
        } else {
          off_sum += s.p[i];
          ++off_n;
        }
      }
      stats.peak_mean_w = peak_n ? peak_sum / peak_n : 0.0;
      stats.offpeak_mean_w = off_n ? off_sum / off_n : 0.0;
      (si == 0 ? summary.clusters[ci].elastic
               : summary.clusters[ci].static_scheme) = stats;
    }
    auto& comp = summary.clusters[ci];
    if (comp.elastic.present && comp.static_scheme.present &&
        comp.static_scheme.energy_wh > 0.0 &&
        comp.static_scheme.peak_mean_w > 0.0 &&
        comp.static_scheme.offpeak_mean_w > 0.0) {
      comp.comparable = true;
      comp.energy_reduction_pct =
          100.0 * (comp.static_scheme.energy_wh - comp.elastic.energy_wh) /
          comp.static_scheme.energy_wh;
      comp.peak_reduction_pct =
          100.0 * (comp.static_scheme.peak_mean_w - comp.elastic.peak_mean_w) /
          comp.static_scheme.peak_mean_w;
      comp.offpeak_reduction_pct =
          100.0 *
          (comp.static_scheme.offpeak_mean_w - comp.elastic.offpeak_mean_w) /
          comp.static_scheme.offpeak_mean_w;
    }
  }
  return summary;
}

inline constexpr const char* kCsvHeader =
    "time_hours,cluster_id,scheme,lambda_u_per_km2,mu_a,lambda_active_per_km2,"
    "tx_power_w,n_cores,area_power_w,vm_power_w,total_power_w,feasible";

// Deterministic CSV: floats at 6 significant digits, one line per row in the
// given order, LF line endings.  Identical inputs give identical bytes.
inline void write_csv(const std::vector<TimeSeriesRow>& rows,
                      std::ostream& out) {
  using detail::g6;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << g6(r.time_hours) << ',' << r.cluster_id << ','
        << scheme_label(r.scheme) << ',' << g6(r.lambda_u_per_km2) << ','
        << g6(r.mu_a) << ',' << g6(r.lambda_active_per_km2) << ','
        << g6(r.tx_power_w) << ',' << r.n_cores << ',' << g6(r.area_power_w)
        << ',' << g6(r.vm_power_w) << ',' << g6(r.total_power_w) << ','
        << (r.feasible ? '1' : '0') << '\n';
  }
}

inline void write_csv(const std::vector<TimeSeriesRow>& rows,
                      const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(rows, f);
  f.flush();
  if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

inline std::string format_summary(const DaySummary& s) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line,
                "peak window [%g, %g) h; reductions are (static - elastic) / static\n",
                s.peak_window_begin, s.peak_window_end);
  out << line;
  std::snprintf(line, sizeof line, "%-14s %-9s %14s %15s %18s\n", "cluster",
                "scheme", "energy [Wh]", "peak mean [W]", "offpeak mean [W]");
  out << line;
  for (const auto& c : s.clusters) {
    if (c.elastic.present) {
      std::snprintf(line, sizeof line, "%-14s %-9s %14.6g %15.6g %18.6g\n",
                    c.cluster_id.c_str(), "elastic", c.elastic.energy_wh,
                    c.elastic.peak_mean_w, c.elastic.offpeak_mean_w);
      out << line;
    }
    if (c.static_scheme.present) {
      std::snprintf(line, sizeof line, "%-14s %-9s %14.6g %15.6g %18.6g\n",
                    c.cluster_id.c_str(), "static", c.static_scheme.energy_wh,
                    c.static_scheme.peak_mean_w, c.static_scheme.offpeak_mean_w);
      out << line;
    }
    if (c.comparable) {
      std::snprintf(line, sizeof line,
                    "%-14s reduction: energy %.1f%%, peak %.1f%%, offpeak %.1f%%\n",
                    c.cluster_id.c_str(), c.energy_reduction_pct,
                    c.peak_reduction_pct, c.offpeak_reduction_pct);
      out << line;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Monte Carlo validation: no-noise coverage across a (alpha, gamma) grid for
// both kernel variants.  The Reference variant is gated (it must agree with
// simulation within max(0.01, 2 CI)); the AsWritten variant is reported and
// flagged where it diverges.  Conditional spectral efficiency is reported,
// not gated.  Cell k draws its seed via SplitMix64::derive_seed(seed, k).

struct CoverageCell {
  double alpha = 0.0;
  double gamma = 0.0;
  double analytic_reference = 0.0;
  double analytic_as_written = 0.0;
  double mc = 0.0;
  double ci_halfwidth = 0.0;
  double delta_reference = 0.0;
  double delta_as_written = 0.0;
  bool reference_ok = false;
  bool as_written_flagged = false;
};

struct SpectralCell {
  double alpha = 0.0;
  double gamma = 0.0;
  double analytic_tau = 0.0;
  double mc = 0.0;
  double ci_halfwidth = 0.0;
};

struct ValidationReport {
  std::vector<CoverageCell> coverage;
  std::vector<SpectralCell> spectral;
  bool all_reference_ok = true;
};

inline ValidationReport validate(const Scenario& sc) {
  geometry::check_config(sc.mc);
  // No-noise cells are scale invariant, so the density and power are fixed
  // reference values rather than scenario quantities.
  const double lambda = 1e-5;
  const double tx_power = 1.0;
  const double alphas[] = {3.0, 3.5, 4.0};
  const double gammas[] = {0.1, 1.0, 10.0};
  ValidationReport report;
  std::uint64_t cell_index = 0;
  for (double alpha : alphas) {
    for (double gamma : gammas) {
      const analytics::RadioEnv env{alpha, gamma, 0.0, sc.radio.bandwidth};
      geometry::McConfig cfg = sc.mc;
      cfg.seed = SplitMix64::derive_seed(sc.mc.seed, cell_index++);
      const auto stats = geometry::mc_stats(env, lambda, tx_power, cfg);
      CoverageCell cell;
      cell.alpha = alpha;
      cell.gamma = gamma;
      cell.analytic_reference =
          analytics::coverage_no_noise(env, analytics::KernelVariant::Reference);
      cell.analytic_as_written =
          analytics::coverage_no_noise(env, analytics::KernelVariant::AsWritten);
      cell.mc = stats.coverage.value;
      cell.ci_halfwidth = stats.coverage.ci_halfwidth;
      cell.delta_reference = std::abs(cell.mc - cell.analytic_reference);
      cell.delta_as_written = std::abs(cell.mc - cell.analytic_as_written);
      const double tol = std::max(0.01, 2.0 * cell.ci_halfwidth);
      cell.reference_ok = cell.delta_reference <= tol;
      cell.as_written_flagged = cell.delta_as_written > tol;
      report.all_reference_ok = report.all_reference_ok && cell.reference_ok;
      report.coverage.push_back(cell);
      if (stats.covered_trials > 0) {
        SpectralCell se;
        se.alpha = alpha;
        se.gamma = gamma;
        se.analytic_tau = analytics::spectral_efficiency(env);
        se.mc = stats.spectral_efficiency.value;
        se.ci_halfwidth = stats.spectral_efficiency.ci_halfwidth;
        report.spectral.push_back(se);
      }
    }
  }
  return report;
}

inline std::string format_validation(const ValidationReport& r) {
  std::ostringstream out;
  char line[256];
  out << "no-noise coverage, simulation vs analytics (gate: reference variant "
         "within max(0.01, 2 CI))\n";
  std::snprintf(line, sizeof line, "%5s %6s %10s %10s %10s %8s %8s %6s %s\n",
                "alpha", "gamma", "mc", "ref", "aswritten", "d_ref", "d_aw",
                "ok", "aw_flag");
  out << line;
  for (const auto& c : r.coverage) {
    std::snprintf(line, sizeof line,
                  "%5.2g %6.3g %10.4f %10.4f %10.4f %8.4f %8.4f %6s %s\n",
                  c.alpha, c.gamma, c.mc, c.analytic_reference,
                  c.analytic_as_written, c.delta_reference, c.delta_as_written,
                  c.reference_ok ? "pass" : "FAIL",
                  c.as_written_flagged ? "flagged" : "-");
    out << line;
  }
  out << "\nconditional spectral efficiency (reported, not gated)\n";
  std::snprintf(line, sizeof line, "%5s %6s %10s %10s %10s\n", "alpha",
                "gamma", "mc", "tau", "delta");
  out << line;
  for (const auto& c : r.spectral) {
    std::snprintf(line, sizeof line, "%5.2g %6.3g %10.4f %10.4f %10.4f\n",
                  c.alpha, c.gamma, c.mc, c.analytic_tau,
                  std::abs(c.mc - c.analytic_tau));
    out << line;
  }
  out << (r.all_reference_ok
              ? "\nresult: reference variant consistent with simulation\n"
              : "\nresult: reference variant DISAGREES with simulation\n");
  return out.str();
}

// Plain-text gnuplot script plotting total power vs hour for every cluster
// and scheme present in the CSV; no rendering dependency.
inline void write_gnuplot_script(const Scenario& sc, Scheme scheme,
                                 const std::string& csv_name,
                                 const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_gnuplot_script: cannot open " + path);
  f << "# total cluster power over one day; generated alongside " << csv_name
    << "\n"
    << "set datafile separator ','\n"
    << "set xlabel 'hour of day'\n"
    << "set ylabel 'total cluster power [W]'\n"
    << "set xrange [0:24]\n"
    << "set key outside\n"
    << "set grid\n"
    << "plot \\\n";
  std::vector<const char*> labels;
  if (scheme == Scheme::Both || scheme == Scheme::Elastic)
    labels.push_back("elastic");
  if (scheme == Scheme::Both || scheme == Scheme::Static)
    labels.push_back("static");
  bool first = true;
  for (const auto& cl : sc.clusters) {
    for (const char* lab : labels) {
      if (!first) f << ", \\\n";
      first = false;
      f << "  '" << csv_name << "' every ::1 using 1:(strcol(2) eq '" << cl.id
        << "' && strcol(3) eq '" << lab << "' ? $11 : 1/0) with lines title '"
        << cl.id << " / " << lab << "'";
    }
  }
  f << "\n";
  f.flush();
  if (!f)
    throw std::runtime_error("write_gnuplot_script: write failed for " + path);
}

}  // namespace cransim::runner
