#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cransim/runner.hpp"
#include "cransim/scenario.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace cransim;
using namespace cransim::runner;

namespace {

Scenario flat_scenario(double lambda_u) {
  Scenario sc;
  traffic::ClusterSpec cl;
  cl.id = "flat";
  cl.area_km2 = 25.0;
  cl.lambda_r = 1e-5;
  cl.profile.kind = traffic::ProfileKind::Sinusoid;
  cl.profile.lambda_peak = lambda_u;
  cl.profile.lambda_trough = lambda_u;
  cl.profile.peak_hour = 12.0;
  sc.clusters.push_back(cl);
  return sc;
}

Scenario load_default_scenario() {
  const std::string path = std::string(CRANSIM_SCENARIO_DIR) + "/default.json";
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return traffic::load_scenario(buf.str());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("run_day rejects bad arguments") {
  const Scenario sc = flat_scenario(5e-4);
  CHECK_THROWS_AS(run_day(sc, Scheme::Both, 60), std::invalid_argument);
  CHECK_THROWS_AS(run_day(sc, Scheme::Elastic, 7), std::domain_error);
  CHECK_THROWS_AS(run_day(sc, Scheme::Elastic, 0), std::domain_error);
  CHECK_THROWS_AS(run_day(sc, Scheme::Elastic, -15), std::domain_error);
}

TEST_CASE("row counts follow the timestep") {
  const Scenario sc = flat_scenario(5e-4);
  CHECK(run_day(sc, Scheme::Elastic, 60).size() == 24);
  CHECK(run_day(sc, Scheme::Static, 15).size() == 96);
  CHECK(run_timeseries(sc, Scheme::Both, 60).size() == 48);
  CHECK(run_timeseries(sc, Scheme::Elastic, 60).size() == 24);
}

TEST_CASE("constant demand makes elastic and static identical") {
  const Scenario sc = flat_scenario(5e-4);
  const auto elastic = run_day(sc, Scheme::Elastic, 60);
  const auto stat = run_day(sc, Scheme::Static, 60);
  REQUIRE(elastic.size() == stat.size());
  for (std::size_t i = 0; i < elastic.size(); ++i) {
    CHECK(elastic[i].time_hours == stat[i].time_hours);
    CHECK(elastic[i].cluster_id == stat[i].cluster_id);
    CHECK(elastic[i].scheme == Scheme::Elastic);
    CHECK(stat[i].scheme == Scheme::Static);
    CHECK(elastic[i].lambda_u_per_km2 == stat[i].lambda_u_per_km2);
    CHECK(elastic[i].mu_a == stat[i].mu_a);
    CHECK(elastic[i].tx_power_w == stat[i].tx_power_w);
    CHECK(elastic[i].n_cores == stat[i].n_cores);
    CHECK(elastic[i].total_power_w == stat[i].total_power_w);
    CHECK(elastic[i].feasible == stat[i].feasible);
  }
}

TEST_CASE("default scenario: elastic never exceeds static, rows are consistent") {
  const Scenario sc = load_default_scenario();
  REQUIRE(sc.clusters.size() == 3);
  const auto rows = run_timeseries(sc, Scheme::Both, 60);
  REQUIRE(rows.size() == 24 * 3 * 2);

  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const auto& e = rows[i];
    const auto& s = rows[i + 1];
    // sorted order pairs the schemes per (time, cluster)
    REQUIRE(e.scheme == Scheme::Elastic);
    REQUIRE(s.scheme == Scheme::Static);
    REQUIRE(e.time_hours == s.time_hours);
    REQUIRE(e.cluster_id == s.cluster_id);
    CHECK(e.total_power_w <= s.total_power_w + 1e-9);
  }

  for (const auto& r : rows) {
    CHECK(r.feasible);
    CHECK(r.mu_a >= 0.0);
    CHECK(r.mu_a <= 1.0);
    CHECK(r.n_cores >= 1);
    CHECK(r.tx_power_w >= 0.0);
    CHECK(r.area_power_w > 0.0);
    CHECK(r.vm_power_w > 0.0);
    CHECK_THAT(r.total_power_w, WithinRel(r.area_power_w + r.vm_power_w, 1e-12));
    CHECK_THAT(r.lambda_active_per_km2,
               WithinRel(r.mu_a * 10.0, 1e-9));  // 10 RRHs per km^2 deployed
  }

  // merged rows are sorted by (time, cluster id, elastic before static)
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const bool ordered =
        a.time_hours < b.time_hours ||
        (a.time_hours == b.time_hours &&
         (a.cluster_id < b.cluster_id ||
          (a.cluster_id == b.cluster_id && a.scheme == Scheme::Elastic &&
           b.scheme == Scheme::Static)));
    CHECK(ordered);
  }
}

TEST_CASE("summary energy and window means") {
  SECTION("constant power over hourly samples integrates exactly") {
    std::vector<TimeSeriesRow> rows;
    for (int h = 0; h < 24; ++h) {
      TimeSeriesRow r;
      r.time_hours = h;
      r.cluster_id = "c";
      r.scheme = Scheme::Elastic;
      r.total_power_w = 100.0;
      rows.push_back(r);
      r.scheme = Scheme::Static;
      rows.push_back(r);
    }
    const auto s = summarize(rows);
    REQUIRE(s.clusters.size() == 1);
    const auto& c = s.clusters[0];
    CHECK(c.elastic.present);
    CHECK(c.static_scheme.present);
    CHECK(c.elastic.energy_wh == 2400.0);
    CHECK(c.static_scheme.energy_wh == 2400.0);
    CHECK(c.comparable);
    CHECK(c.energy_reduction_pct == 0.0);
    CHECK(c.peak_reduction_pct == 0.0);
    CHECK(c.offpeak_reduction_pct == 0.0);
  }

  SECTION("peak window is half-open at its end") {
    std::vector<TimeSeriesRow> rows(2);
    rows[0].time_hours = 8.0;
    rows[0].cluster_id = "c";
    rows[0].total_power_w = 200.0;
    rows[1].time_hours = 19.0;
    rows[1].cluster_id = "c";
    rows[1].total_power_w = 100.0;
    const auto s = summarize(rows);
    CHECK(s.clusters[0].elastic.peak_mean_w == 200.0);
    CHECK(s.clusters[0].elastic.offpeak_mean_w == 100.0);
  }

  SECTION("single-scheme input is not comparable") {
    const Scenario sc = flat_scenario(5e-4);
    const auto s = summarize(run_day(sc, Scheme::Elastic, 60));
    REQUIRE(s.clusters.size() == 1);
    CHECK(s.clusters[0].elastic.present);
    CHECK_FALSE(s.clusters[0].static_scheme.present);
    CHECK_FALSE(s.clusters[0].comparable);
  }

  SECTION("empty input throws") {
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
  }

  SECTION("uniform sampling: energy equals the window sums") {
    const Scenario sc = load_default_scenario();
    const auto s = summarize(run_timeseries(sc, Scheme::Both, 60));
    for (const auto& c : s.clusters) {
      for (const auto* st : {&c.elastic, &c.static_scheme}) {
        REQUIRE(st->present);
        // periodic trapezoid at a uniform 1 h step reduces to the plain sum,
        // which the two window means partition (11 peak + 13 off-peak hours)
        CHECK_THAT(st->peak_mean_w * 11.0 + st->offpeak_mean_w * 13.0,
                   WithinRel(st->energy_wh, 1e-9));
      }
      CHECK(c.comparable);
      CHECK(c.energy_reduction_pct > 0.0);
    }
    CHECK_THAT(format_summary(s), ContainsSubstring("reduction"));
  }
}

TEST_CASE("CSV output format") {
  const Scenario sc = flat_scenario(5e-4);
  const auto rows = run_timeseries(sc, Scheme::Both, 360);

  SECTION("header and shape") {
    std::ostringstream out;
    write_csv(rows, out);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == kCsvHeader);
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      CHECK(split_csv_line(line).size() == 12);
    }
    CHECK(n == rows.size());
  }

  SECTION("no rows gives a bare header") {
    std::ostringstream out;
    write_csv({}, out);
    CHECK(out.str() == std::string(kCsvHeader) + "\n");
  }

  SECTION("repeated writes are byte-identical") {
    std::ostringstream a, b;
    write_csv(rows, a);
    write_csv(rows, b);
    CHECK(a.str() == b.str());
  }

  SECTION("fields round-trip at six significant digits") {
    std::ostringstream out;
    write_csv(rows, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    for (const auto& r : rows) {
      REQUIRE(std::getline(in, line));
      const auto f = split_csv_line(line);
      REQUIRE(f.size() == 12);
      CHECK_THAT(std::strtod(f[0].c_str(), nullptr),
                 WithinAbs(r.time_hours, 1e-9));
      CHECK(f[1] == r.cluster_id);
      CHECK(f[2] == scheme_label(r.scheme));
      CHECK_THAT(std::strtod(f[3].c_str(), nullptr),
                 WithinRel(r.lambda_u_per_km2, 1e-5));
      CHECK_THAT(std::strtod(f[4].c_str(), nullptr), WithinAbs(r.mu_a, 1e-5));
      CHECK_THAT(std::strtod(f[6].c_str(), nullptr),
                 WithinAbs(r.tx_power_w, 1e-5 * (1.0 + r.tx_power_w)));
      CHECK(std::stoi(f[7]) == r.n_cores);
      CHECK_THAT(std::strtod(f[10].c_str(), nullptr),
                 WithinRel(r.total_power_w, 1e-5));
      CHECK(f[11] == (r.feasible ? "1" : "0"));
    }
  }

  SECTION("file writer produces the same bytes as the stream writer") {
    const std::string path = "runner_csv_tmp.csv";
    write_csv(rows, path);
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream disk;
    disk << f.rdbuf();
    std::ostringstream mem;
    write_csv(rows, mem);
    CHECK(disk.str() == mem.str());
    f.close();
    std::remove(path.c_str());
  }
}

TEST_CASE("gnuplot script references every cluster and scheme") {
  const Scenario sc = load_default_scenario();
  const std::string path = "runner_plot_tmp.gp";
  write_gnuplot_script(sc, Scheme::Both, "timeseries.csv", path);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string script = buf.str();
  f.close();
  std::remove(path.c_str());

  CHECK_THAT(script, ContainsSubstring("set datafile separator ','"));
  CHECK_THAT(script, ContainsSubstring("timeseries.csv"));
  CHECK_THAT(script, ContainsSubstring("$11"));
  for (const auto& cl : sc.clusters)
    CHECK_THAT(script, ContainsSubstring("'" + cl.id + "'"));
  CHECK_THAT(script, ContainsSubstring("'elastic'"));
  CHECK_THAT(script, ContainsSubstring("'static'"));
}

TEST_CASE("simulation validation report structure") {
  Scenario sc = load_default_scenario();
  sc.mc.trials = 4000;  // enough to separate the kernels, quick to run
  const auto report = validate(sc);

  REQUIRE(report.coverage.size() == 9);
  CHECK(report.spectral.size() == 9);
  for (const auto& c : report.coverage) {
    CHECK(c.mc >= 0.0);
    CHECK(c.mc <= 1.0);
    CHECK(c.ci_halfwidth > 0.0);
    CHECK(c.analytic_reference > 0.0);
    CHECK(c.analytic_as_written > 0.0);
  }

  // the literal interference kernel visibly disagrees with simulation at
  // alpha 4, gamma 1 (the gap is about 0.17), while the corrected kernel
  // tracks it
  bool saw_flag_cell = false;
  for (const auto& c : report.coverage) {
    if (c.alpha == 4.0 && c.gamma == 1.0) {
      saw_flag_cell = true;
      CHECK(c.delta_as_written > 0.1);
      CHECK(c.as_written_flagged);
      CHECK(c.delta_reference < 0.05);
    }
  }
  CHECK(saw_flag_cell);

  const std::string text = format_validation(report);
  CHECK_THAT(text, ContainsSubstring("flagged"));
  CHECK_THAT(text, ContainsSubstring("spectral efficiency"));

  // same scenario, same seeds: the report reproduces exactly
  const auto again = validate(sc);
  REQUIRE(again.coverage.size() == report.coverage.size());
  for (std::size_t i = 0; i < report.coverage.size(); ++i)
    CHECK(again.coverage[i].mc == report.coverage[i].mc);
}
