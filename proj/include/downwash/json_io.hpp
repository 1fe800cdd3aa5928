#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/fit.hpp"
#include "downwash/jet.hpp"
#include "downwash/sim.hpp"
#include "downwash/version.hpp"

namespace downwash {

inline void to_json(nlohmann::json& j, const DroneSpec& d) {
  j = {{"name", d.name},
       {"mass_kg", d.mass_kg},
       {"propeller_diameter_m", 2.0 * d.propeller_radius_m},
       {"motor_distance_m", d.motor_distance_m},
       {"n_propellers", d.n_propellers},
       {"cant", to_string(d.cant)}};
}

inline void from_json(const nlohmann::json& j, DroneSpec& d) {
  // a bare string selects a preset
  if (j.is_string()) {
    const auto* preset = find_preset(j.get<std::string>());
    if (!preset) {
      throw std::invalid_argument("unknown drone preset '" + j.get<std::string>() + "'");
    }
    d = *preset;
    return;
  }
  d.name = j.value("name", std::string{});
  d.mass_kg = j.at("mass_kg").get<double>();
  d.propeller_radius_m = 0.5 * j.at("propeller_diameter_m").get<double>();
  d.motor_distance_m = j.at("motor_distance_m").get<double>();
  d.n_propellers = j.value("n_propellers", 4);
  d.cant = cant_from_string(j.value("cant", std::string{"uncanted"}));
}

inline void to_json(nlohmann::json& j, const Environment& env) {
  j = {{"pressure_pa", env.pressure_pa},
       {"temperature_k", env.temperature_k},
       {"gravity", env.gravity}};
  if (env.viscosity_pa_s) j["viscosity_pa_s"] = *env.viscosity_pa_s;
}

inline void from_json(const nlohmann::json& j, Environment& env) {
  env.pressure_pa = j.value("pressure_pa", Environment{}.pressure_pa);
  env.temperature_k = j.value("temperature_k", Environment{}.temperature_k);
  env.gravity = j.value("gravity", constants::standard_gravity);
  if (j.contains("viscosity_pa_s")) {
    env.viscosity_pa_s = j.at("viscosity_pa_s").get<double>();
  }
}

inline void to_json(nlohmann::json& j, const JetParameters& p) {
  j = {{"bd", p.bd}, {"spreading_rate", p.spreading_rate}, {"s0_norm", p.s0_norm}};
}

inline void from_json(const nlohmann::json& j, JetParameters& p) {
  p.bd = j.value("bd", JetParameters{}.bd);
  p.spreading_rate = j.value("spreading_rate", JetParameters{}.spreading_rate);
  p.s0_norm = j.value("s0_norm", JetParameters{}.s0_norm);
}

inline void to_json(nlohmann::json& j, const SliceFit& s) {
  j = {{"s_norm", s.s_norm},
       {"u_c_norm", s.u_c_norm},
       {"r_half_norm", s.r_half_norm},
       {"residual_rms", s.residual_rms},
       {"in_far_field", s.in_far_field}};
}

inline void to_json(nlohmann::json& j, const BimodalFit& b) {
  j = {{"s_norm", b.s_norm},
       {"delta_norm", b.delta_norm},
       {"width", b.width},
       {"amplitude", b.amplitude}};
}

inline void to_json(nlohmann::json& j, const MergeResult& m) {
  j = {{"merged", m.merged}, {"threshold", m.threshold}};
  if (m.merged) j["s_merge_norm"] = m.s_merge_norm;
}

inline void to_json(nlohmann::json& j, const ResidualTest& t) {
  j = {{"xi_lo", t.xi_lo},       {"xi_hi", t.xi_hi},
       {"n", t.n},               {"mean_residual", t.mean_residual},
       {"t_statistic", t.t_statistic}, {"p_value", t.p_value},
       {"reject_h0", t.reject_h0},     {"testable", t.testable}};
}

inline void to_json(nlohmann::json& j, const ControllerGains& g) {
  j = {{"kp", g.kp}, {"kd", g.kd}};
}

inline void from_json(const nlohmann::json& j, ControllerGains& g) {
  g.kp = j.value("kp", ControllerGains{}.kp);
  g.kd = j.value("kd", ControllerGains{}.kd);
}

inline void to_json(nlohmann::json& j, const SimConfig& c) {
  j = {{"upper_drone", c.upper_drone},
       {"lower_drone", c.lower_drone},
       {"env", c.env},
       {"params", c.params},
       {"vertical_separation_m", c.vertical_separation_m},
       {"crossing_speed_mps", c.crossing_speed_mps},
       {"horizontal_span_m", c.horizontal_span_m},
       {"timestep_s", c.timestep_s},
       {"gains", c.gains},
       {"compensation_enabled", c.compensation_enabled},
       {"upper_drone_present", c.upper_drone_present},
       {"height_noise_sigma_m", c.height_noise_sigma_m},
       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, SimConfig& c) {
  j.at("upper_drone").get_to(c.upper_drone);
  j.at("lower_drone").get_to(c.lower_drone);
  if (j.contains("env")) j.at("env").get_to(c.env);
  if (j.contains("params")) j.at("params").get_to(c.params);
  c.vertical_separation_m = j.at("vertical_separation_m").get<double>();
  c.crossing_speed_mps = j.at("crossing_speed_mps").get<double>();
  c.horizontal_span_m = j.at("horizontal_span_m").get<double>();
  c.timestep_s = j.value("timestep_s", SimConfig{}.timestep_s);
  if (j.contains("gains")) j.at("gains").get_to(c.gains);
  c.compensation_enabled = j.value("compensation_enabled", true);
  c.upper_drone_present = j.value("upper_drone_present", true);
  c.height_noise_sigma_m = j.value("height_noise_sigma_m", 0.0);
  c.seed = j.value("seed", std::uint64_t{0});
}

inline nlohmann::json metrics_json(const SimResult& r) {
  return {{"rmse_mm", r.rmse_mm},
          {"mean_err_mm", r.mean_err_mm},
          {"max_abs_err_mm", r.max_abs_err_mm}};
}

/// FNV-1a 64-bit digest, used to fingerprint input files in manifests.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

/// Reproducibility block embedded in every CLI output artifact.
struct RunManifest {
  std::string subcommand;
  nlohmann::json resolved_config;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, digest
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [path, digest] : m.input_digests) inputs[path] = digest;
  j = {{"subcommand", m.subcommand},
       {"tool_version", version},
       {"resolved_config", m.resolved_config},
       {"input_digests", inputs}};
}

}  // namespace downwash
