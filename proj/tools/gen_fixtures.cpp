// Regenerates the checked-in fixtures: synthetic flight logs for three
// presets and the two bundled pass-under configs. Usage:
//   gen_fixtures [output_dir]   (default: fixtures)

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "downwash/downwash.hpp"

namespace {

void write_log_csv(const std::string& path,
                   const std::vector<downwash::MeasurementRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time_s,px_m,py_m,pz_m,speed_mps,anemo_mps\n";
  char line[160];
  for (const auto& rec : records) {
    std::snprintf(line, sizeof(line), "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f\n", rec.time_s,
                  rec.drone_position_m[0], rec.drone_position_m[1],
                  rec.drone_position_m[2], rec.drone_speed_mps,
                  rec.anemometer_speed_mps);
    out << line;
  }
  std::cout << "wrote " << path << " (" << records.size() << " records)\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(root / "logs");
  std::filesystem::create_directories(root / "configs");

  const downwash::Environment env;
  const downwash::JetParameters params;

  // far-field logs: 11x11 lattice at 0.33 l pitch, 8 stations, 2% noise
  downwash::GridFlightPlan plan;
  plan.lateral_extent_norm = 1.65;
  plan.lateral_resolution_norm = 0.33;
  plan.s_levels_norm = {2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  plan.dwell_samples = 3;
  plan.transit_samples = 1;
  plan.pre_takeoff_samples = 25;
  plan.sample_period_s = 0.1;

  downwash::NoiseModel noise;
  noise.multiplicative_sigma = 0.02;
  noise.ambient_mps = 0.08;

  std::uint64_t seed = 101;
  for (const char* name : {"kolibri", "offboard2", "matrice300"}) {
    const auto* drone = downwash::find_preset(name);
    const auto records =
        downwash::synthesize_log(*drone, env, params, plan, noise, seed++);
    write_log_csv((root / "logs" / (std::string(name) + ".csv")).string(), records);
  }

  // pass-under configs: Kolibri crossing one motor distance per second
  downwash::SimConfig config;
  config.upper_drone = *downwash::find_preset("offboard2");
  config.lower_drone = *downwash::find_preset("kolibri");
  config.crossing_speed_mps = config.lower_drone.motor_distance_m;  // 1 l/s
  config.horizontal_span_m = 4.0;
  config.timestep_s = 0.002;
  config.compensation_enabled = true;
  config.seed = 1;
  for (double separation : {1.0, 2.0}) {
    config.vertical_separation_m = separation;
    nlohmann::json j;
    downwash::to_json(j, config);
    const auto path =
        root / "configs" /
        ("passunder_" + std::to_string(static_cast<int>(separation)) + "m.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}
