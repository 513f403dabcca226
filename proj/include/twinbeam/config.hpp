#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinbeam/channel.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/gain_curve.hpp"
#include "twinbeam/sweep.hpp"

namespace twinbeam {

/// How the channel is specified when no [fit] table is present.
struct ChannelConfig {
  std::string family = "ideal";  // ideal | lumped | cascade
  double gain = 2.0;
  double eta_probe = 1.0;
  double eta_conj = 1.0;
  LossPlacement placement = LossPlacement::loss_after_gain;
  int steps = 800;
  double gamma_total = 0.0;
  double alpha_probe_total = 0.0;
  double alpha_conj_total = 0.0;

  ChannelSpec to_spec() const;
};

struct FitConfig {
  FitFamily family = FitFamily::lumped_before;
  double target_g_p = 0.84;
  double target_g_c = 0.16;
  std::optional<double> target_nsf_db;
};

struct ImageConfig {
  int l = -1;
  int l_pump = 0;
  int p = 0;
  double waist_um = 370.0;
  double wavelength_nm = 894.6;
  double extent_um = 1480.0;
  std::int64_t resolution = 256;
  double z_um = 0.0;
  double fringes = 12.0;
  int bit_depth = 16;
};

/// Laboratory conditions echoed into outputs. Never enters the model.
struct ExperimentContext {
  double one_photon_detuning_ghz = 1.6;
  double pump_power_mw = 740.0;
  double cell_temperature_c = 80.0;
  double cell_length_mm = 25.0;
  double crossing_angle_mrad = 6.0;
  double pump_waist_um = 780.0;
  double probe_waist_um = 370.0;
  double pump_rabi_mhz = 535.0;
  double sideband_offset_ghz = 9.2;
};

struct RunConfig {
  std::string scenario = "custom";
  std::string output_dir = "twinbeam-out";
  std::uint64_t rng_seed = 1;
  double seed_amplitude = 1000.0;
  double delta_mhz = 0.0;
  double probe_transmission = 1.0;
  std::int64_t mc_samples = 0;

  ChannelConfig channel;
  std::optional<FitConfig> fit;
  DetectionChain detection;
  GainCurveModel gain_curve;
  SweepSettings sweep;
  ImageConfig image;
  ExperimentContext context;
};

struct ConfigDiagnostic {
  int line = 0;  // 0 when the problem has no single source line
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Category { missing_file, syntax, constraint };

  ConfigError(Category category, std::vector<ConfigDiagnostic> diagnostics);

  Category category() const { return category_; }
  const std::vector<ConfigDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  Category category_;
  std::vector<ConfigDiagnostic> diagnostics_;
};

/// Reads and validates a TOML run configuration. All violations are reported
/// together in the thrown ConfigError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Checks the cross-field constraints of a programmatically built config.
void validate(const RunConfig& config);

/// Canonical JSON echo of the config; excludes output_dir so that outputs do
/// not depend on where they are written.
nlohmann::json to_json(const RunConfig& config);

/// TOML text that parse_config_text() maps back to `config`.
std::string to_toml(const RunConfig& config);

/// 16 hex digits, FNV-1a over the canonical JSON echo.
std::string config_hash(const RunConfig& config);

RunConfig preset_fig2();
RunConfig preset_fig3();
RunConfig preset_fig4();

}  // namespace twinbeam
