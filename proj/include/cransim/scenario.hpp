#pragma once

// Scenario configuration: one JSON document describing the radio environment,
// power constants, provisioning constraints, clusters with diurnal traffic
// profiles, Monte Carlo settings, and run options.  Parsing is strict --
// unknown keys are rejected and every invariant violation names the offending
// field -- so a scenario either loads completely or fails with a pointed
// diagnostic.
//
// Unit conventions at the config surface: densities are per km^2 (converted
// to per m^2 internally, factor 1e-6), the SINR threshold is in dB (converted
// to linear), areas in km^2, powers in watts.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cransim/analytics.hpp"
#include "cransim/geometry.hpp"
#include "cransim/power.hpp"
#include "cransim/provision.hpp"
#include "cransim/traffic.hpp"

namespace cransim {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scheme { Elastic, Static, Both };

inline const char* scheme_label(Scheme s) {
  switch (s) {
    case Scheme::Elastic: return "elastic";
    case Scheme::Static: return "static";
    default: return "both";
  }
}

struct RunOptions {
  int timestep_minutes = 15;
  analytics::KernelVariant kernel = analytics::KernelVariant::Reference;
  Scheme scheme = Scheme::Both;
};

struct Scenario {
  analytics::RadioEnv radio{4.0, 1.0, 1e-13, 20e6};  // defaults: alpha 4, 0 dB
  power::PowerParams power{{12.4, 3.5, 0.32},        // RRH active/sleep/eta
                           {20.0, 4.0, 0.5},         // OLT, ONU active/sleep
                           {72.0, 0.7, 3.3, 117.4}}; // per-core pool model
  bool shared_olt = false;  // divide OLT power across clusters when set
  provision::Constraints constraints{0.75, 200e3, 2600.0, 100};
  std::vector<traffic::ClusterSpec> clusters;
  geometry::McConfig mc;
  RunOptions run;
  std::vector<std::string> warnings;  // non-fatal config advisories
};

}  // namespace cransim

namespace cransim::traffic {

namespace detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

inline double get_number(const json& obj, const std::string& path,
                         const char* key, std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

inline std::int64_t get_integer(const json& obj, const std::string& path,
                                const char* key,
                                std::optional<std::int64_t> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t get_uint(const json& obj, const std::string& path,
                              const char* key,
                              std::optional<std::uint64_t> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key,
                     bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& obj, const std::string& path,
                              const char* key,
                              std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline DiurnalProfile parse_profile(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string type = get_string(j, path, "type", std::nullopt);
  DiurnalProfile p;
  if (type == "sinusoid") {
    reject_unknown(j, path, {"type", "peak_per_km2", "trough_per_km2", "peak_hour"});
    p.kind = ProfileKind::Sinusoid;
    const double peak = get_number(j, path, "peak_per_km2", std::nullopt);
    const double trough = get_number(j, path, "trough_per_km2", std::nullopt);
    p.peak_hour = get_number(j, path, "peak_hour", std::nullopt);
    if (!(trough >= 0.0)) fail(path + ".trough_per_km2", "must be nonnegative");
    if (!(peak >= trough)) fail(path + ".peak_per_km2", "must be >= trough_per_km2");
    if (!(p.peak_hour >= 0.0 && p.peak_hour < 24.0))
      fail(path + ".peak_hour", "must lie in [0,24)");
    p.lambda_peak = peak * 1e-6;
    p.lambda_trough = trough * 1e-6;
  } else if (type == "piecewise" || type == "table") {
    reject_unknown(j, path, {"type", "knots"});
    p.kind = type == "piecewise" ? ProfileKind::PiecewiseLinear
                                 : ProfileKind::Table;
    if (!j.contains("knots") || !j.at("knots").is_array() || j.at("knots").empty())
      fail(path + ".knots", "expected a nonempty array of [hour, density_per_km2] pairs");
    double prev = -1.0;
    for (std::size_t i = 0; i < j.at("knots").size(); ++i) {
      const json& k = j.at("knots")[i];
      const std::string kpath = path + ".knots[" + std::to_string(i) + "]";
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        fail(kpath, "expected [hour, density_per_km2]");
      const double hour = k[0].get<double>();
      const double dens = k[1].get<double>();
      if (!(hour >= 0.0 && hour < 24.0)) fail(kpath + ".hour", "must lie in [0,24)");
      if (!(hour > prev)) fail(kpath + ".hour", "hours must be strictly increasing");
      if (!(dens >= 0.0)) fail(kpath + ".density_per_km2", "must be nonnegative");
      prev = hour;
      p.knots.push_back({hour, dens * 1e-6});
    }
  } else {
    fail(path + ".type", "expected one of sinusoid|piecewise|table");
  }
  return p;
}

}  // namespace detail

// Parse and fully validate a scenario document.  Throws ScenarioError with a
// field path on any violation; a successful return satisfies every module's
// invariants.
inline Scenario load_scenario(const std::string& config_text) {
  using detail::fail;
  using nlohmann::json;
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("config: ") + e.what());
  }
  detail::expect_object(root, "config");
  detail::reject_unknown(root, "config",
                         {"radio", "power", "constraints", "clusters", "mc", "run"});

  Scenario sc;

  if (root.contains("radio")) {
    const json& r = root.at("radio");
    detail::expect_object(r, "radio");
    detail::reject_unknown(r, "radio",
                           {"alpha", "gamma_db", "noise_w", "bandwidth_hz"});
    sc.radio.alpha = detail::get_number(r, "radio", "alpha", 4.0);
    const double gamma_db = detail::get_number(r, "radio", "gamma_db", 0.0);
    sc.radio.gamma = std::pow(10.0, gamma_db / 10.0);
    sc.radio.sigma2 = detail::get_number(r, "radio", "noise_w", 1e-13);
    sc.radio.bandwidth = detail::get_number(r, "radio", "bandwidth_hz", 20e6);
    if (!(sc.radio.alpha > 2.0)) fail("radio.alpha", "must exceed 2");
    if (!(sc.radio.sigma2 >= 0.0)) fail("radio.noise_w", "must be nonnegative");
    if (!(sc.radio.bandwidth > 0.0)) fail("radio.bandwidth_hz", "must be positive");
  }

  if (root.contains("power")) {
    const json& p = root.at("power");
    detail::expect_object(p, "power");
    detail::reject_unknown(p, "power", {"rrh", "transport", "vm"});
    if (p.contains("rrh")) {
      const json& r = p.at("rrh");
      detail::expect_object(r, "power.rrh");
      detail::reject_unknown(r, "power.rrh", {"active_w", "sleep_w", "eta"});
      auto& rr = sc.power.rrh;
      rr.p_active_circuit = detail::get_number(r, "power.rrh", "active_w", rr.p_active_circuit);
      rr.p_sleep = detail::get_number(r, "power.rrh", "sleep_w", rr.p_sleep);
      rr.amp_efficiency = detail::get_number(r, "power.rrh", "eta", rr.amp_efficiency);
      if (!(rr.p_sleep >= 0.0)) fail("power.rrh.sleep_w", "must be nonnegative");
      if (!(rr.p_active_circuit > rr.p_sleep))
        fail("power.rrh.active_w", "must exceed sleep_w");
      if (!(rr.amp_efficiency > 0.0 && rr.amp_efficiency <= 1.0))
        fail("power.rrh.eta", "must lie in (0,1]");
    }
    if (p.contains("transport")) {
      const json& t = p.at("transport");
      detail::expect_object(t, "power.transport");
      detail::reject_unknown(t, "power.transport",
                             {"olt_w", "onu_active_w", "onu_sleep_w", "shared_olt"});
      auto& tt = sc.power.transport;
      tt.p_olt = detail::get_number(t, "power.transport", "olt_w", tt.p_olt);
      tt.p_onu_active = detail::get_number(t, "power.transport", "onu_active_w", tt.p_onu_active);
      tt.p_onu_sleep = detail::get_number(t, "power.transport", "onu_sleep_w", tt.p_onu_sleep);
      sc.shared_olt = detail::get_bool(t, "power.transport", "shared_olt", false);
      if (!(tt.p_olt >= 0.0)) fail("power.transport.olt_w", "must be nonnegative");
      if (!(tt.p_onu_sleep >= 0.0)) fail("power.transport.onu_sleep_w", "must be nonnegative");
      if (!(tt.p_onu_active > tt.p_onu_sleep))
        fail("power.transport.onu_active_w", "must exceed onu_sleep_w");
    }
    if (p.contains("vm")) {
      const json& v = p.at("vm");
      detail::expect_object(v, "power.vm");
      detail::reject_unknown(v, "power.vm", {"pmax_w", "beta", "cpu_ghz", "upsilon"});
      auto& vv = sc.power.vm;
      vv.p_max_per_core = detail::get_number(v, "power.vm", "pmax_w", vv.p_max_per_core);
      vv.beta_idle = detail::get_number(v, "power.vm", "beta", vv.beta_idle);
      vv.cpu_speed_ghz = detail::get_number(v, "power.vm", "cpu_ghz", vv.cpu_speed_ghz);
      vv.msc_constant = detail::get_number(v, "power.vm", "upsilon", vv.msc_constant);
      if (!(vv.p_max_per_core > 0.0)) fail("power.vm.pmax_w", "must be positive");
      if (!(vv.beta_idle >= 0.0 && vv.beta_idle <= 1.0))
        fail("power.vm.beta", "must lie in [0,1]");
      if (!(vv.cpu_speed_ghz > 0.0)) fail("power.vm.cpu_ghz", "must be positive");
      if (!(vv.msc_constant > 0.0)) fail("power.vm.upsilon", "must be positive");
    }
  }

  if (root.contains("constraints")) {
    const json& c = root.at("constraints");
    detail::expect_object(c, "constraints");
    detail::reject_unknown(c, "constraints",
                           {"epsilon", "r_min_bps", "deadline_us", "n_prb"});
    auto& cc = sc.constraints;
    cc.epsilon = detail::get_number(c, "constraints", "epsilon", cc.epsilon);
    cc.r_min = detail::get_number(c, "constraints", "r_min_bps", cc.r_min);
    cc.deadline_us = detail::get_number(c, "constraints", "deadline_us", cc.deadline_us);
    cc.n_prb = static_cast<int>(detail::get_integer(c, "constraints", "n_prb", cc.n_prb));
    if (!(cc.epsilon > 0.0 && cc.epsilon < 1.0))
      fail("constraints.epsilon", "must lie in (0,1)");
    if (!(cc.r_min > 0.0)) fail("constraints.r_min_bps", "must be positive");
    if (!(cc.deadline_us > 0.0)) fail("constraints.deadline_us", "must be positive");
    if (cc.n_prb < 1) fail("constraints.n_prb", "must be >= 1");
  }
  if (sc.constraints.deadline_us > 2600.0)
    sc.warnings.push_back(
        "constraints.deadline_us: exceeds the 2600 us downlink processing budget");

  if (!root.contains("clusters"))
    fail("clusters", "missing required key");
  const json& cl = root.at("clusters");
  if (!cl.is_array() || cl.empty())
    fail("clusters", "expected a nonempty array");
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const std::string path = "clusters[" + std::to_string(i) + "]";
    const json& c = cl[i];
    detail::expect_object(c, path);
    detail::reject_unknown(c, path, {"id", "area_km2", "lambda_r_per_km2", "profile"});
    ClusterSpec spec;
    spec.id = detail::get_string(c, path, "id", std::nullopt);
    if (spec.id.empty()) fail(path + ".id", "must be nonempty");
    for (const auto& other : sc.clusters)
      if (other.id == spec.id) fail(path + ".id", "duplicate cluster id '" + spec.id + "'");
    spec.area_km2 = detail::get_number(c, path, "area_km2", std::nullopt);
    if (!(spec.area_km2 > 0.0)) fail(path + ".area_km2", "must be positive");
    const double lr = detail::get_number(c, path, "lambda_r_per_km2", std::nullopt);
    if (!(lr > 0.0)) fail(path + ".lambda_r_per_km2", "must be positive");
    spec.lambda_r = lr * 1e-6;
    if (!c.contains("profile")) fail(path + ".profile", "missing required key");
    spec.profile = detail::parse_profile(c.at("profile"), path + ".profile");
    try {
      check_profile(spec.profile);
    } catch (const std::domain_error& e) {
      fail(path + ".profile", e.what());
    }
    sc.clusters.push_back(std::move(spec));
  }

  if (root.contains("mc")) {
    const json& m = root.at("mc");
    detail::expect_object(m, "mc");
    detail::reject_unknown(m, "mc", {"trials", "window_factor", "seed"});
    sc.mc.trials = detail::get_uint(m, "mc", "trials", sc.mc.trials);
    sc.mc.window_radius_factor =
        detail::get_number(m, "mc", "window_factor", sc.mc.window_radius_factor);
    sc.mc.seed = detail::get_uint(m, "mc", "seed", std::uint64_t{42});
    if (sc.mc.trials < 1) fail("mc.trials", "must be >= 1");
    if (!(sc.mc.window_radius_factor >= 10.0))
      fail("mc.window_factor", "must be >= 10");
  }

  if (root.contains("run")) {
    const json& r = root.at("run");
    detail::expect_object(r, "run");
    detail::reject_unknown(r, "run", {"timestep_minutes", "kernel_variant", "scheme"});
    sc.run.timestep_minutes = static_cast<int>(
        detail::get_integer(r, "run", "timestep_minutes", sc.run.timestep_minutes));
    const std::string kv =
        detail::get_string(r, "run", "kernel_variant", std::string("reference"));
    if (kv == "aswritten")
      sc.run.kernel = analytics::KernelVariant::AsWritten;
    else if (kv == "reference")
      sc.run.kernel = analytics::KernelVariant::Reference;
    else
      fail("run.kernel_variant", "expected aswritten|reference");
    const std::string sch = detail::get_string(r, "run", "scheme", std::string("both"));
    if (sch == "elastic")
      sc.run.scheme = Scheme::Elastic;
    else if (sch == "static")
      sc.run.scheme = Scheme::Static;
    else if (sch == "both")
      sc.run.scheme = Scheme::Both;
    else
      fail("run.scheme", "expected elastic|static|both");
  }
  if (sc.run.timestep_minutes < 1 || 1440 % sc.run.timestep_minutes != 0)
    fail("run.timestep_minutes", "must divide the 1440-minute day evenly");

  return sc;
}

}  // namespace cransim::traffic
