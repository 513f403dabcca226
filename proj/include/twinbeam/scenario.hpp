#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinbeam/config.hpp"

namespace twinbeam {

enum class Command { simulate, sweep_detuning, render_beams, fit, optimize_attenuation, presets };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);

enum class SummaryFormat { csv, json };

struct RunResult {
  nlohmann::json summary;
  /// Files written, relative to the output directory, in write order.
  std::vector<std::string> files;
  /// False when a computation finished but its result is flagged (e.g. a
  /// channel fit that could not reach its target).
  bool all_succeeded = true;
  std::vector<std::string> warnings;
};

nlohmann::json describe(const ChannelSpec& spec);

/// Runs one command and writes its outputs plus summary.<format> into
/// config.output_dir. Deterministic for a fixed config.
RunResult run_scenario(Command command, const RunConfig& config, SummaryFormat format);

/// Summary text as written to disk: JSON document, or provenance comment lines
/// followed by `key,value` rows.
std::string render_summary(const nlohmann::json& summary, SummaryFormat format);

/// Column header of the detuning sweep CSV.
inline constexpr std::string_view kSweepCsvHeader =
    "delta_mhz,g_p,g_c,g_sum,nsf_linear,nsf_db,t_star,nsf_star_db";

}  // namespace twinbeam
