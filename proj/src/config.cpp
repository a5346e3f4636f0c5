#include "twinbeam/config.hpp"

#include "twinbeam/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

namespace twinbeam {

namespace {

using Field = std::variant<double RunConfig::*, int RunConfig::*,
                           long long RunConfig::*, std::optional<double> RunConfig::*,
                           std::string RunConfig::*>;

struct Entry {
  const char* key;
  Field field;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"theta0_mrad", &RunConfig::theta0_mrad},
      {"wavelength_m", &RunConfig::wavelength_m},
      {"cell_length_m", &RunConfig::cell_length_m},
      {"pump_far_width_mrad", &RunConfig::pump_far_width_mrad},
      {"overlap_width_mrad", &RunConfig::overlap_width_mrad},
      {"gain_target", &RunConfig::gain_target},
      {"s0_1d_per_mrad", &RunConfig::s0_1d_per_mrad},
      {"s0_2d_per_mrad2", &RunConfig::s0_2d_per_mrad2},
      {"calibration_label", &RunConfig::calibration_label},
      {"grid1d_half_extent_mrad", &RunConfig::grid1d_half_extent_mrad},
      {"grid1d_n_side", &RunConfig::grid1d_n_side},
      {"grid2d_half_extent_mrad", &RunConfig::grid2d_half_extent_mrad},
      {"grid2d_n_side", &RunConfig::grid2d_n_side},
      {"seed_waist_mrad", &RunConfig::seed_waist_mrad},
      {"seed_photons", &RunConfig::seed_photons},
      {"detection_efficiency", &RunConfig::detection_efficiency},
      {"sweep_theta_min_mrad", &RunConfig::sweep_theta_min_mrad},
      {"sweep_theta_max_mrad", &RunConfig::sweep_theta_max_mrad},
      {"sweep_theta_step_mrad", &RunConfig::sweep_theta_step_mrad},
      {"slit_width_mrad", &RunConfig::slit_width_mrad},
      {"conj_slit_offset_mrad", &RunConfig::conj_slit_offset_mrad},
      {"slit_scan_half_range_mrad", &RunConfig::slit_scan_half_range_mrad},
      {"spot_waist_mrad", &RunConfig::spot_waist_mrad},
      {"two_spot_separation_mrad", &RunConfig::two_spot_separation_mrad},
      {"lg_waist_mrad", &RunConfig::lg_waist_mrad},
      {"ell", &RunConfig::ell},
      {"out_dir", &RunConfig::out_dir},
      {"random_seed", &RunConfig::random_seed},
  };
  return e;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::config, "config key '" + key + "': " + why);
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries()) {
    if (key == e.key) return e;
  }
  bad(key, "unknown key");
}

void check(bool ok, const char* key, const std::string& why) {
  if (!ok) bad(key, why);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void assign_json(RunConfig& c, const std::string& key, const nlohmann::json& v) {
  const Entry& e = find_entry(key);
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(c.*member)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) bad(key, "expected a number");
          c.*member = v.get<double>();
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long long>) {
          if (!v.is_number_integer()) bad(key, "expected an integer");
          const auto x = v.get<long long>();
          if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
            bad(key, "integer out of range");
          }
          c.*member = static_cast<T>(x);
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (v.is_null()) {
            c.*member = std::nullopt;
          } else {
            if (!v.is_number()) bad(key, "expected a number or null");
            c.*member = v.get<double>();
          }
        } else {
          if (!v.is_string()) bad(key, "expected a string");
          c.*member = v.get<std::string>();
        }
      },
      e.field);
}

}  // namespace

void RunConfig::validate() const {
  check(std::isfinite(theta0_mrad) && theta0_mrad >= 0.0, "theta0_mrad",
        "must be a non-negative angle");
  check(finite_positive(wavelength_m), "wavelength_m", "must be positive");
  check(finite_positive(cell_length_m), "cell_length_m", "must be positive");
  check(finite_positive(pump_far_width_mrad), "pump_far_width_mrad", "must be positive");
  check(finite_positive(overlap_width_mrad), "overlap_width_mrad", "must be positive");
  check(std::isfinite(gain_target) && gain_target >= 1.0, "gain_target",
        "must be at least 1");
  check(!s0_1d_per_mrad || (std::isfinite(*s0_1d_per_mrad) && *s0_1d_per_mrad >= 0.0),
        "s0_1d_per_mrad", "must be non-negative");
  check(!s0_2d_per_mrad2 || (std::isfinite(*s0_2d_per_mrad2) && *s0_2d_per_mrad2 >= 0.0),
        "s0_2d_per_mrad2", "must be non-negative");
  check(finite_positive(grid1d_half_extent_mrad), "grid1d_half_extent_mrad",
        "must be positive");
  check(grid1d_n_side >= 2 && grid1d_n_side % 2 == 0 && grid1d_n_side <= 4096,
        "grid1d_n_side", "must be an even integer in [2, 4096]");
  check(finite_positive(grid2d_half_extent_mrad), "grid2d_half_extent_mrad",
        "must be positive");
  check(grid2d_n_side >= 2 && grid2d_n_side % 2 == 0 && grid2d_n_side <= 96,
        "grid2d_n_side", "must be an even integer in [2, 96]");
  check(finite_positive(seed_waist_mrad), "seed_waist_mrad", "must be positive");
  check(finite_positive(seed_photons), "seed_photons", "must be positive");
  check(std::isfinite(detection_efficiency) && detection_efficiency > 0.0 &&
            detection_efficiency <= 1.0,
        "detection_efficiency", "must lie in (0, 1]");
  check(std::isfinite(sweep_theta_min_mrad) && sweep_theta_min_mrad >= 0.0,
        "sweep_theta_min_mrad", "must be a non-negative angle");
  check(std::isfinite(sweep_theta_max_mrad) && sweep_theta_max_mrad > sweep_theta_min_mrad,
        "sweep_theta_max_mrad", "must exceed sweep_theta_min_mrad");
  check(finite_positive(sweep_theta_step_mrad), "sweep_theta_step_mrad",
        "must be positive");
  check(finite_positive(slit_width_mrad), "slit_width_mrad", "must be positive");
  check(std::isfinite(conj_slit_offset_mrad), "conj_slit_offset_mrad", "must be finite");
  check(finite_positive(slit_scan_half_range_mrad), "slit_scan_half_range_mrad",
        "must be positive");
  check(finite_positive(spot_waist_mrad), "spot_waist_mrad", "must be positive");
  check(finite_positive(two_spot_separation_mrad), "two_spot_separation_mrad",
        "must be positive");
  check(finite_positive(lg_waist_mrad), "lg_waist_mrad", "must be positive");
  check(ell >= -3 && ell <= 3, "ell", "must lie in [-3, 3]");
  check(!out_dir.empty(), "out_dir", "must not be empty");
  check(random_seed >= 0, "random_seed", "must be non-negative");
}

GainConfig RunConfig::gain() const {
  GainConfig g;
  g.s0 = 1.0;
  g.theta0 = theta0_mrad;
  g.wavelength = wavelength_m;
  g.cell_length = cell_length_m;
  g.pump_far_width = pump_far_width_mrad;
  g.overlap_width = overlap_width_mrad;
  return g;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); })) {
    return c;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::config, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) assign_json(c, key, value);
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : entries()) {
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(c.*member)>;
          if constexpr (std::is_same_v<T, std::optional<double>>) {
            j[e.key] = (c.*member) ? nlohmann::json(*(c.*member)) : nlohmann::json(nullptr);
          } else {
            j[e.key] = c.*member;
          }
        },
        e.field);
  }
  return j;
}

void set_config_value(RunConfig& c, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');
  const Entry& e = find_entry(key);
  nlohmann::json v;
  if (std::holds_alternative<std::string RunConfig::*>(e.field)) {
    v = value;
  } else if (value == "null") {
    v = nullptr;
  } else {
    try {
      v = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      bad(key, "cannot parse value '" + value + "'");
    }
  }
  assign_json(c, key, v);
  c.validate();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& e : entries()) k.emplace_back(e.key);
  return k;
}

}  // namespace twinbeam
