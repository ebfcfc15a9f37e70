// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cfmimo/common.hpp"

namespace cfmimo {

SystemConfig SystemConfig::table_defaults() { return SystemConfig{}; }

SystemConfig SystemConfig::desk_scale() {
  SystemConfig cfg;
  cfg.antennas_per_ula = 16;
  cfg.num_aps = 6;
  cfg.num_subcarriers = 128;
  cfg.cp_length = 16;
  // Keep the delay support well inside the CP window, like the full-size
  // defaults (30 of 144); taps = cp_length would change the overlap geometry
  // every shift-allocation result depends on.
  cfg.num_taps = 4;
  cfg.num_ues = 40;
  cfg.mc_samples = 1000;
  return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: " + field + " " + why);
}

void require(bool ok, const char* field, const char* why) {
  if (!ok) fail(field, why);
}

}  // namespace

void SystemConfig::validate() const {
  require(num_subcarriers > 0, "num_subcarriers", "must be positive");
  require(cp_length > 0, "cp_length", "must be positive");
  require(cp_length <= num_subcarriers, "cp_length", "must not exceed num_subcarriers");
  require(pilot_symbols > 0, "pilot_symbols", "must be positive");
  require(slot_symbols > 0, "slot_symbols", "must be positive");
  require(pilot_symbols < slot_symbols, "pilot_symbols",
          "must be less than slot_symbols (no room left for data)");
  require(frame_slots > 0, "frame_slots", "must be positive");
  require(antennas_per_ula > 0, "antennas_per_ula", "must be positive");
  require(num_aps > 0, "num_aps", "must be positive");
  require(num_ues > 0, "num_ues", "must be positive");
  require(num_clusters > 0, "num_clusters", "must be positive");
  require(num_clusters <= num_ues, "num_clusters", "must not exceed num_ues");
  require(apsp_set_size > 0, "apsp_set_size", "must be positive");
  require(apsp_set_size <= shift_universe_size(), "apsp_set_size",
          "must not exceed the shift universe N_c*Z");
  require(ap_selection_threshold > 0.0 && ap_selection_threshold <= 1.0,
          "ap_selection_threshold", "must lie in (0,1]");
  require(overlap_threshold >= 0.0, "overlap_threshold", "must be nonnegative");
  require(activation_prob >= 0.0 && activation_prob <= 1.0, "activation_prob",
          "must be a probability");
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(carrier_freq_mhz > 0.0, "carrier_freq_mhz", "must be positive");
  require(sample_duration_s > 0.0, "sample_duration_s", "must be positive");
  require(ap_height_m > 0.0, "ap_height_m", "must be positive");
  require(ue_height_m > 0.0, "ue_height_m", "must be positive");
  require(breakpoint_d0_m > 0.0, "breakpoint_d0_m", "must be positive");
  require(breakpoint_d1_m > breakpoint_d0_m, "breakpoint_d1_m",
          "must exceed breakpoint_d0_m");
  require(shadow_sigma_db >= 0.0, "shadow_sigma_db", "must be nonnegative");
  require(tx_power_w > 0.0, "tx_power_w", "must be positive");
  require(angle_spread_rad > 0.0, "angle_spread_rad", "must be positive");
  require(delay_spread_s > 0.0, "delay_spread_s", "must be positive");
  require(num_taps > 0, "num_taps", "must be positive");
  require(area_side_m > 0.0, "area_side_m", "must be positive");
  require(dinkelbach_tol > 0.0, "dinkelbach_tol", "must be positive");
  require(power_control_subcarrier >= 0 && power_control_subcarrier < num_subcarriers,
          "power_control_subcarrier", "must index a subcarrier");
  require(mc_samples > 0, "mc_samples", "must be positive");
}

double SystemConfig::noise_power_w() const {
  return bandwidth_hz * kBoltzmann * kNoiseTempK * std::pow(10.0, noise_figure_db / 10.0);
}

double SystemConfig::normalized_snr() const { return tx_power_w / noise_power_w(); }

double SystemConfig::prelog_factor() const {
  double cp = static_cast<double>(num_subcarriers) / (num_subcarriers + cp_length);
  double pilot = static_cast<double>(slot_symbols - pilot_symbols) / slot_symbols;
  return cp * pilot;
}

namespace {

// One registry drives parsing and writing so the two cannot drift.
struct Field {
  std::function<void(SystemConfig&, const std::string&)> set;
  std::function<std::string(const SystemConfig&)> get;
};

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
T parse_number(const std::string& key, const std::string& text);

template <>
double parse_number<double>(const std::string& key, const std::string& text) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    fail(key, "expects a number, got '" + text + "'");
  }
  if (pos != text.size()) fail(key, "expects a number, got '" + text + "'");
  return v;
}

template <>
int parse_number<int>(const std::string& key, const std::string& text) {
  size_t pos = 0;
  long v;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
    fail(key, "expects an integer, got '" + text + "'");
  }
  if (pos != text.size()) fail(key, "expects an integer, got '" + text + "'");
  return static_cast<int>(v);
}

template <>
uint64_t parse_number<uint64_t>(const std::string& key, const std::string& text) {
  size_t pos = 0;
  unsigned long long v;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    fail(key, "expects an unsigned integer, got '" + text + "'");
  }
  if (pos != text.size()) fail(key, "expects an unsigned integer, got '" + text + "'");
  return static_cast<uint64_t>(v);
}

template <>
bool parse_number<bool>(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(key, "expects true/false, got '" + text + "'");
}

const std::map<std::string, Field>& field_registry() {
#define CFMIMO_FIELD(name, type)                                                      \
  {                                                                                   \
    #name, Field {                                                                    \
      [](SystemConfig& c, const std::string& v) { c.name = parse_number<type>(#name, v); }, \
      [](const SystemConfig& c) {                                                     \
        if constexpr (std::is_same_v<type, double>) return format_double(c.name);     \
        else if constexpr (std::is_same_v<type, bool>) return std::string(c.name ? "true" : "false"); \
        else return std::to_string(c.name);                                           \
      }                                                                               \
    }                                                                                 \
  }
  static const std::map<std::string, Field> registry = {
      CFMIMO_FIELD(num_subcarriers, int),
      CFMIMO_FIELD(cp_length, int),
      CFMIMO_FIELD(pilot_symbols, int),
      CFMIMO_FIELD(slot_symbols, int),
      CFMIMO_FIELD(frame_slots, int),
      CFMIMO_FIELD(sample_duration_s, double),
      CFMIMO_FIELD(bandwidth_hz, double),
      CFMIMO_FIELD(carrier_freq_mhz, double),
      CFMIMO_FIELD(antennas_per_ula, int),
      CFMIMO_FIELD(num_aps, int),
      CFMIMO_FIELD(num_ues, int),
      CFMIMO_FIELD(area_side_m, double),
      CFMIMO_FIELD(ap_height_m, double),
      CFMIMO_FIELD(ue_height_m, double),
      CFMIMO_FIELD(breakpoint_d0_m, double),
      CFMIMO_FIELD(breakpoint_d1_m, double),
      CFMIMO_FIELD(shadow_sigma_db, double),
      CFMIMO_FIELD(tx_power_w, double),
      CFMIMO_FIELD(noise_figure_db, double),
      CFMIMO_FIELD(angle_spread_rad, double),
      CFMIMO_FIELD(delay_spread_s, double),
      CFMIMO_FIELD(num_taps, int),
      CFMIMO_FIELD(random_aoa, bool),
      CFMIMO_FIELD(num_clusters, int),
      CFMIMO_FIELD(apsp_set_size, int),
      CFMIMO_FIELD(ap_selection_threshold, double),
      CFMIMO_FIELD(overlap_threshold, double),
      CFMIMO_FIELD(activation_prob, double),
      CFMIMO_FIELD(dinkelbach_tol, double),
      CFMIMO_FIELD(power_control_subcarrier, int),
      CFMIMO_FIELD(mc_samples, int),
      CFMIMO_FIELD(rng_seed, uint64_t),
  };
#undef CFMIMO_FIELD
  return registry;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

SystemConfig parse_config(std::istream& in, const SystemConfig& base) {
  SystemConfig cfg = base;
  const auto& registry = field_registry();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + body + "'");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    auto it = registry.find(key);
    if (it == registry.end())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    it->second.set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

SystemConfig parse_config_file(const std::string& path, const SystemConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  return parse_config(in, base);
}

void write_config(std::ostream& out, const SystemConfig& cfg) {
  // Fixed, human-scannable order rather than the map's alphabetical one.
  static const char* order[] = {
      "num_subcarriers", "cp_length", "pilot_symbols", "slot_symbols", "frame_slots",
      "sample_duration_s", "bandwidth_hz", "carrier_freq_mhz", "antennas_per_ula",
      "num_aps", "num_ues", "area_side_m", "ap_height_m", "ue_height_m",
      "breakpoint_d0_m", "breakpoint_d1_m", "shadow_sigma_db", "tx_power_w",
      "noise_figure_db", "angle_spread_rad", "delay_spread_s", "num_taps", "random_aoa",
      "num_clusters", "apsp_set_size", "ap_selection_threshold", "overlap_threshold",
      "activation_prob", "dinkelbach_tol", "power_control_subcarrier", "mc_samples",
      "rng_seed"};
  const auto& registry = field_registry();
  for (const char* key : order) out << key << " = " << registry.at(key).get(cfg) << "\n";
}

}  // namespace cfmimo
