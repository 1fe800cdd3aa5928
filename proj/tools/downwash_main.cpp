// Command-line front end: evaluate the downwash field, export grids, fit
// jet parameters from flight logs, and run pass-under simulations.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "downwash/downwash.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_usage = 2;

struct DroneFlags {
  std::string preset;
  std::optional<double> mass_kg;
  std::optional<double> prop_diameter_m;
  std::optional<double> motor_distance_m;
  std::optional<int> n_props;

  void attach(CLI::App* cmd) {
    cmd->add_option("--drone", preset, "drone preset name (see `presets`)");
    cmd->add_option("--mass", mass_kg, "drone mass [kg]");
    cmd->add_option("--prop-diameter", prop_diameter_m, "propeller diameter [m]");
    cmd->add_option("--motor-distance", motor_distance_m,
                    "diagonal motor distance l [m]");
    cmd->add_option("--n-props", n_props, "number of propellers");
  }

  downwash::DroneSpec resolve() const {
    downwash::DroneSpec drone;
    if (!preset.empty()) {
      const auto* found = downwash::find_preset(preset);
      if (!found) {
        throw CLI::ValidationError("--drone", "unknown preset '" + preset + "'");
      }
      drone = *found;
    } else {
      if (!mass_kg || !prop_diameter_m || !motor_distance_m) {
        throw CLI::ValidationError(
            "drone", "pass --drone or all of --mass, --prop-diameter, --motor-distance");
      }
      drone.name = "custom";
    }
    if (mass_kg) drone.mass_kg = *mass_kg;
    if (prop_diameter_m) drone.propeller_radius_m = 0.5 * *prop_diameter_m;
    if (motor_distance_m) drone.motor_distance_m = *motor_distance_m;
    if (n_props) drone.n_propellers = *n_props;
    downwash::validate(drone);
    return drone;
  }
};

struct EnvFlags {
  double pressure_pa = downwash::Environment{}.pressure_pa;
  double temperature_k = downwash::Environment{}.temperature_k;

  void attach(CLI::App* cmd) {
    cmd->add_option("--pressure", pressure_pa, "ambient pressure [Pa]")
        ->capture_default_str();
    cmd->add_option("--temperature", temperature_k, "ambient temperature [K]")
        ->capture_default_str();
  }

  downwash::Environment resolve() const {
    downwash::Environment env;
    env.pressure_pa = pressure_pa;
    env.temperature_k = temperature_k;
    return env;
  }
};

downwash::RunManifest make_manifest(const std::string& subcommand, json config) {
  downwash::RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.resolved_config = std::move(config);
  return manifest;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_eval(const DroneFlags& drone_flags, const EnvFlags& env_flags, double s_m,
             double r_m, bool as_json, bool clamp) {
  const auto drone = drone_flags.resolve();
  const auto env = env_flags.resolve();
  const downwash::JetParameters params;
  const auto policy = clamp ? downwash::NearFieldPolicy::clamp_to_merge_distance
                            : downwash::NearFieldPolicy::error;
  const auto sample =
      downwash::evaluate_far_field(drone, env, params, {s_m, r_m, 0.0}, policy);

  if (as_json) {
    json out = {{"speed_mps", sample.speed_mps},
                {"u_h_mps", sample.u_h_mps},
                {"u_c_mps", sample.u_c_mps},
                {"u_c_norm", sample.u_c_norm},
                {"s_norm", sample.s_norm},
                {"r_norm", sample.r_norm},
                {"xi", sample.xi},
                {"r_half_norm", sample.r_half_norm},
                {"r_half_m", sample.r_half_m},
                {"clamped", sample.clamped},
                {"qualitative_only", sample.qualitative_only}};
    json config = {{"drone", drone}, {"env", env}, {"params", params},
                   {"s_m", s_m},     {"r_m", r_m}, {"clamp_near_field", clamp}};
    out["manifest"] = make_manifest("eval", config);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::setprecision(9);
    std::cout << "speed    " << sample.speed_mps << " m/s\n"
              << "U_H      " << sample.u_h_mps << " m/s\n"
              << "U_C      " << sample.u_c_mps << " m/s  (U_C/U_H " << sample.u_c_norm
              << ")\n"
              << "s_norm   " << sample.s_norm << "\n"
              << "xi       " << sample.xi << "\n"
              << "r_half   " << sample.r_half_m << " m  (r_half/l " << sample.r_half_norm
              << ")\n";
    if (sample.clamped) {
      std::cout << "note     near-field query clamped to s_norm = "
                << downwash::far_field_min_s_norm << "\n";
    }
    if (sample.qualitative_only) {
      std::cout << "note     canted propellers: treat magnitudes as qualitative\n";
    }
  }
  return exit_ok;
}

int run_grid(const DroneFlags& drone_flags, const EnvFlags& env_flags, double extent,
             double resolution, const std::string& format) {
  if (!(resolution > 0.0)) {
    throw CLI::ValidationError("--resolution", "must be positive");
  }
  if (!(extent >= downwash::far_field_min_s_norm)) {
    throw CLI::ValidationError("--extent",
                               "must reach at least the far-field start (2.5)");
  }
  const auto drone = drone_flags.resolve();
  const auto env = env_flags.resolve();
  const downwash::JetParameters params;

  struct Row {
    double s_norm, r_norm, u_mps, u_norm, r_half_norm, r_half_m;
  };
  std::vector<Row> rows;
  for (double s_norm = downwash::far_field_min_s_norm; s_norm <= extent + 1e-9;
       s_norm += resolution) {
    for (double r_norm = 0.0; r_norm <= extent + 1e-9; r_norm += resolution) {
      const downwash::FlowPoint point{s_norm * drone.motor_distance_m,
                                      r_norm * drone.motor_distance_m, 0.0};
      const auto sample = downwash::evaluate_far_field(drone, env, params, point);
      rows.push_back({s_norm, r_norm, sample.speed_mps, sample.speed_mps / sample.u_h_mps,
                      sample.r_half_norm, sample.r_half_m});
    }
  }

  json config = {{"drone", drone},   {"env", env},           {"params", params},
                 {"extent", extent}, {"resolution", resolution}, {"format", format}};
  const json manifest = make_manifest("grid", config);

  if (format == "json") {
    json out = {{"manifest", manifest}, {"rows", json::array()}};
    for (const auto& row : rows) {
      out["rows"].push_back({{"s_norm", row.s_norm},
                             {"r_norm", row.r_norm},
                             {"u_mps", row.u_mps},
                             {"u_norm", row.u_norm},
                             {"r_half_norm", row.r_half_norm},
                             {"r_half_m", row.r_half_m}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "# manifest " << manifest.dump() << "\n";
    std::cout << "s_norm,r_norm,u_mps,u_norm,r_half_norm,r_half_m\n"
              << std::setprecision(10);
    for (const auto& row : rows) {
      std::cout << row.s_norm << ',' << row.r_norm << ',' << row.u_mps << ','
                << row.u_norm << ',' << row.r_half_norm << ',' << row.r_half_m << "\n";
    }
  }
  return exit_ok;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

int run_fit(const std::vector<std::string>& log_paths, const DroneFlags& drone_flags,
            const std::string& out_path) {
  const auto drone = drone_flags.resolve();
  const downwash::Environment env;
  constexpr double resolution = 0.33;
  constexpr double slice_thickness = 0.5;
  constexpr double ambient_window_s = 2.0;
  constexpr double hover_v_max = 0.1;

  json diagnostics = json::array();
  std::vector<downwash::MeasurementRecord> pooled;
  std::vector<double> ambients;
  std::vector<std::pair<std::string, std::string>> digests;

  for (const auto& path : log_paths) {
    const std::string bytes = stage("load_log", [&] { return read_file(path); });
    digests.emplace_back(path, downwash::fnv1a64_hex(bytes));
    std::istringstream in(bytes);
    downwash::LogDiagnostics diag;
    auto records = stage("load_log", [&] { return downwash::load_log(in, &diag); });
    const double ambient =
        stage("estimate_ambient", [&] { return downwash::estimate_ambient(records, ambient_window_s); });
    ambients.push_back(ambient);
    auto hover = downwash::filter_hover(records, hover_v_max);
    auto corrected = downwash::subtract_ambient(std::move(hover), ambient);
    pooled.insert(pooled.end(), corrected.begin(), corrected.end());

    json rejected = json::array();
    for (const auto& [line, why] : diag.rejected_rows) {
      rejected.push_back({{"line", line}, {"reason", why}});
    }
    diagnostics.push_back({{"file", path},
                           {"rows_read", diag.rows_read},
                           {"rows_accepted", diag.rows_accepted},
                           {"ambient_mps", ambient},
                           {"rejected_rows", rejected}});
  }

  const auto grid =
      stage("bin_grid", [&] { return downwash::bin_grid(pooled, drone, env, resolution); });
  std::vector<std::string> warnings;
  const auto profiles = stage("radial_profiles", [&] {
    return downwash::radial_profiles(grid, slice_thickness, &warnings);
  });

  std::vector<downwash::SliceFit> slices;
  for (const auto& profile : profiles) {
    try {
      slices.push_back(downwash::fit_slice(profile));
    } catch (const std::exception& e) {
      warnings.push_back("fit_slice(s_norm=" + std::to_string(profile.s_norm) +
                         "): " + e.what());
    }
  }
  const auto params =
      stage("fit_jet_parameters", [&] { return downwash::fit_jet_parameters(slices); });

  // lateral-profile branch: bimodal fits along y through the symmetry plane.
  // Far-field slices degenerate to delta ~ 0, which is exactly what merge
  // detection needs to see; merge is only meaningful when near-field slices
  // exist at all.
  json bimodal = json::array();
  json merge_json = nullptr;
  {
    const auto y_profiles =
        downwash::y_axis_profiles(grid, slice_thickness, 0.5 * resolution);
    std::vector<downwash::BimodalFit> fits;
    bool any_near_field = false;
    for (const auto& profile : y_profiles) {
      if (!(profile.s_norm > 0.0)) continue;
      try {
        fits.push_back(downwash::fit_bimodal(profile));
        bimodal.push_back(fits.back());
        if (profile.s_norm < downwash::far_field_min_s_norm) any_near_field = true;
      } catch (const std::exception& e) {
        warnings.push_back("fit_bimodal(s_norm=" + std::to_string(profile.s_norm) +
                           "): " + e.what());
      }
    }
    if (any_near_field && fits.size() >= 3) {
      merge_json = downwash::merge_distance(fits);
    }
  }

  const auto residual_samples =
      downwash::collect_profile_residual_samples(profiles, slices);
  const auto tests = downwash::residual_test(residual_samples);

  const downwash::JetParameters reference;
  json config = {{"drone", drone},
                 {"env", env},
                 {"logs", log_paths},
                 {"resolution_norm", resolution},
                 {"slice_thickness_norm", slice_thickness},
                 {"hover_v_max_mps", hover_v_max},
                 {"ambient_window_s", ambient_window_s}};
  auto manifest = make_manifest("fit", config);
  manifest.input_digests = digests;

  json report = {
      {"manifest", manifest},
      {"diagnostics", diagnostics},
      {"slices", slices},
      {"jet_parameters", params},
      {"reference_parameters", reference},
      {"reference_delta_pct",
       {{"bd", 100.0 * (params.bd / reference.bd - 1.0)},
        {"spreading_rate",
         100.0 * (params.spreading_rate / reference.spreading_rate - 1.0)},
        {"s0_norm", 100.0 * (params.s0_norm / reference.s0_norm - 1.0)}}},
      {"bimodal", bimodal},
      {"merge", merge_json},
      {"residual_tests", tests},
      {"warnings", warnings}};

  if (out_path.empty() || out_path == "-") {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << report.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
  return exit_ok;
}

int run_simulate(const std::string& config_path, bool compare,
                 const std::string& out_prefix) {
  const std::string bytes = read_file(config_path);
  downwash::SimConfig config;
  try {
    json::parse(bytes).get_to(config);
  } catch (const json::exception& e) {
    throw std::runtime_error("config '" + config_path + "': " + e.what());
  }
  config.validate();

  json manifest_config;
  downwash::to_json(manifest_config, config);
  auto manifest = make_manifest("simulate", manifest_config);
  manifest.input_digests.emplace_back(config_path, downwash::fnv1a64_hex(bytes));
  const json manifest_json = manifest;

  auto write_series = [&](const std::string& suffix, const downwash::SimResult& result) {
    if (out_prefix.empty()) return std::string{};
    const std::string path = out_prefix + suffix;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "# manifest " << manifest_json.dump() << "\n";
    downwash::write_series_csv(out, result);
    return path;
  };

  json summary = {{"manifest", manifest_json}};
  if (compare) {
    const auto result = downwash::run_comparison(config);
    summary["compensated"] = downwash::metrics_json(result.compensated);
    summary["uncompensated"] = downwash::metrics_json(result.uncompensated);
    summary["improvement_ratio"] = result.improvement;
    const auto on_path = write_series(".on.csv", result.compensated);
    const auto off_path = write_series(".off.csv", result.uncompensated);
    if (!on_path.empty()) summary["series_files"] = {on_path, off_path};
  } else {
    const auto result = downwash::run_passunder(config);
    summary["metrics"] = downwash::metrics_json(result);
    summary["compensation_enabled"] = config.compensation_enabled;
    const auto path = write_series(".csv", result);
    if (!path.empty()) summary["series_files"] = {path};
  }

  if (!out_prefix.empty()) {
    const std::string path = out_prefix + ".summary.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return exit_ok;
}

int run_presets() {
  json out = json::array();
  for (const auto& drone : downwash::presets()) out.push_back(drone);
  std::cout << out.dump(2) << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor downwash model: field evaluation, log fitting, "
               "pass-under simulation"};
  app.set_version_flag("--version", downwash::version);
  app.require_subcommand(1);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate the field at one point");
  DroneFlags eval_drone;
  EnvFlags eval_env;
  eval_drone.attach(eval_cmd);
  eval_env.attach(eval_cmd);
  double s_m = 0.0, r_m = 0.0;
  bool eval_json = false, clamp_near_field = false;
  eval_cmd->add_option("--s", s_m, "downstream distance below the rotor plane [m]")
      ->required();
  eval_cmd->add_option("--r", r_m, "radial distance off axis [m]")->required();
  eval_cmd->add_flag("--json", eval_json, "machine-readable output");
  eval_cmd->add_flag("--clamp-near-field", clamp_near_field,
                     "clamp near-field queries to the merge distance instead of failing");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "export the field on an (s,r) grid");
  DroneFlags grid_drone;
  EnvFlags grid_env;
  grid_drone.attach(grid_cmd);
  grid_env.attach(grid_cmd);
  double extent = 7.0, resolution = 0.5;
  std::string format = "csv";
  grid_cmd->add_option("--extent", extent, "grid extent in motor distances")
      ->capture_default_str();
  grid_cmd->add_option("--resolution", resolution, "grid step in motor distances")
      ->capture_default_str();
  grid_cmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit jet parameters from flight logs");
  DroneFlags fit_drone;
  std::vector<std::string> log_paths;
  std::string fit_out;
  fit_cmd->add_option("--log", log_paths, "flight log CSV (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  fit_drone.attach(fit_cmd);
  fit_cmd->add_option("--out", fit_out, "report path (default: stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run the pass-under scenario");
  std::string sim_config_path, sim_out;
  bool compare = false;
  sim_cmd->add_option("--config", sim_config_path, "SimConfig JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_flag("--compare", compare,
                    "run compensated and uncompensated twins and report the ratio");
  sim_cmd->add_option("--out", sim_out, "output prefix for series CSV and summary JSON");

  // presets
  app.add_subcommand("presets", "list the built-in drone presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (app.got_subcommand("eval")) {
      return run_eval(eval_drone, eval_env, s_m, r_m, eval_json, clamp_near_field);
    }
    if (app.got_subcommand("grid")) {
      return run_grid(grid_drone, grid_env, extent, resolution, format);
    }
    if (app.got_subcommand("fit")) {
      return run_fit(log_paths, fit_drone, fit_out);
    }
    if (app.got_subcommand("simulate")) {
      return run_simulate(sim_config_path, compare, sim_out);
    }
    if (app.got_subcommand("presets")) {
      return run_presets();
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const downwash::near_field_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_internal;
}
