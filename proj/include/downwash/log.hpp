#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "downwash/stats.hpp"

namespace downwash {

/// One flight-log sample. Positions are drone coordinates in a frame with
/// the flow probe at the origin, z up.
struct MeasurementRecord {
  double time_s = 0.0;
  std::array<double, 3> drone_position_m{0.0, 0.0, 0.0};
  double drone_speed_mps = 0.0;
  double anemometer_speed_mps = 0.0;
};

class format_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class empty_input_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-file parse report; rejected rows keep their 1-based line number.
struct LogDiagnostics {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::vector<std::pair<std::size_t, std::string>> rejected_rows;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

/**
 * Parse a flight log in the CSV schema
 * `time_s,px_m,py_m,pz_m,speed_mps,anemo_mps` (header mandatory, columns
 * matched by name, extras ignored). Rows that fail to parse or violate the
 * record invariants are skipped and recorded in the diagnostics. A file
 * with no data rows raises empty_input_error; a header missing a
 * mandatory column raises format_error.
 */
inline std::vector<MeasurementRecord> load_log(std::istream& source,
                                               LogDiagnostics* diagnostics = nullptr) {
  static const std::array<const char*, 6> required = {
      "time_s", "px_m", "py_m", "pz_m", "speed_mps", "anemo_mps"};

  std::string line;
  if (!std::getline(source, line)) {
    throw empty_input_error("load_log: empty input, expected a CSV header");
  }
  const auto header = detail::split_csv_line(line);
  std::array<std::size_t, 6> column{};
  for (std::size_t i = 0; i < required.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == required[i]) {
        column[i] = j;
        found = true;
        break;
      }
    }
    if (!found) {
      throw format_error(std::string("load_log: missing mandatory column '") +
                         required[i] + "'");
    }
  }

  LogDiagnostics local;
  LogDiagnostics& diag = diagnostics ? *diagnostics : local;
  std::vector<MeasurementRecord> records;
  double last_time = -std::numeric_limits<double>::infinity();
  std::size_t line_no = 1;

  while (std::getline(source, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    ++diag.rows_read;
    const auto fields = detail::split_csv_line(line);

    auto reject = [&](const std::string& why) {
      diag.rejected_rows.emplace_back(line_no, why);
    };

    if (fields.size() < header.size()) {
      reject("field count mismatch");
      continue;
    }
    std::array<double, 6> value{};
    bool ok = true;
    for (std::size_t i = 0; i < required.size(); ++i) {
      try {
        std::size_t consumed = 0;
        value[i] = std::stod(fields[column[i]], &consumed);
        if (consumed != fields[column[i]].size()) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (!ok) {
      reject("unparseable numeric field");
      continue;
    }
    if (value[4] < 0.0) {
      reject("negative speed_mps");
      continue;
    }
    if (value[5] < 0.0) {
      reject("negative anemo_mps");
      continue;
    }
    if (value[0] < last_time) {
      reject("time not monotonically non-decreasing");
      continue;
    }
    last_time = value[0];
    records.push_back({value[0], {value[1], value[2], value[3]}, value[4], value[5]});
    ++diag.rows_accepted;
  }

  if (records.empty() && diag.rows_read == 0) {
    throw empty_input_error("load_log: no data rows after header");
  }
  return records;
}

/// Keep only samples taken while the drone was effectively stationary
/// (3D speed at most v_max; boundary inclusive).
inline std::vector<MeasurementRecord> filter_hover(
    const std::vector<MeasurementRecord>& records, double v_max_mps = 0.1) {
  std::vector<MeasurementRecord> kept;
  kept.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.drone_speed_mps <= v_max_mps) kept.push_back(rec);
  }
  return kept;
}

/// Remove the ambient airflow offset, clamping at zero.
inline std::vector<MeasurementRecord> subtract_ambient(
    std::vector<MeasurementRecord> records, double ambient_mps) {
  if (ambient_mps < 0.0) {
    throw std::invalid_argument("subtract_ambient: ambient must be non-negative");
  }
  for (auto& rec : records) {
    rec.anemometer_speed_mps = std::max(0.0, rec.anemometer_speed_mps - ambient_mps);
  }
  return records;
}

/**
 * Ambient airflow estimate: median anemometer reading over the pre-takeoff
 * window [t_first, t_first + window). Requires at least 10 samples in the
 * window; otherwise asks the caller to supply the ambient speed manually.
 */
inline double estimate_ambient(const std::vector<MeasurementRecord>& records,
                               double pre_takeoff_window_s) {
  if (!(pre_takeoff_window_s > 0.0)) {
    throw std::invalid_argument("estimate_ambient: window must be positive");
  }
  std::vector<double> window;
  if (!records.empty()) {
    const double t_end = records.front().time_s + pre_takeoff_window_s;
    for (const auto& rec : records) {
      if (rec.time_s >= t_end) break;
      window.push_back(rec.anemometer_speed_mps);
    }
  }
  if (window.size() < 10) {
    throw std::invalid_argument(
        "estimate_ambient: fewer than 10 samples in the pre-takeoff window; "
        "pass the ambient speed explicitly");
  }
  return median(std::move(window));
}

}  // namespace downwash
