#include "twinbeam/scenario.hpp"

#include <fstream>
#include <sstream>

#include "twinbeam/error.hpp"
#include "twinbeam/lg_mode.hpp"
#include "twinbeam/mc_oracle.hpp"
#include "twinbeam/output.hpp"
#include "twinbeam/sweep.hpp"

namespace twinbeam {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json measurement_json(const NoiseMeasurement& m) { return {{"nsf_linear", m.nsf_linear}, {"nsf_db", m.nsf_db}}; }

json gains_json(const GainPair& g) {
  return {{"g_p", g.g_p}, {"g_c", g.g_c}, {"g_sum", g.g_p + g.g_c}, {"g_difference", g.g_p - g.g_c}};
}

struct ResolvedChannel {
  ChannelSpec spec;
  std::optional<FitResult> fit;
};

ResolvedChannel resolve_channel(const RunConfig& c) {
  if (!c.fit) {
    auto spec = c.channel.to_spec();
    validate(spec);
    return {spec, std::nullopt};
  }
  std::optional<double> nsf;
  if (c.fit->target_nsf_db) nsf = from_decibel(*c.fit->target_nsf_db);
  auto fit = fit_channel({c.fit->target_g_p, c.fit->target_g_c}, nsf, c.fit->family,
                         FitOptions{c.channel.steps, c.detection.quantum_efficiency});
  return {fit.spec, fit};
}

void note_fit(const RunConfig& c, const ResolvedChannel& ch, json& results, RunResult& run) {
  results["channel"] = describe(ch.spec);
  if (!ch.fit) return;
  results["fit"] = {{"family", to_string(c.fit->family)},
                    {"residual", ch.fit->residual},
                    {"reachable", ch.fit->reachable},
                    {"iterations", ch.fit->iterations}};
  if (!ch.fit->reachable) {
    run.all_succeeded = false;
    run.warnings.push_back("channel fit did not reach its targets (residual " + format_number(ch.fit->residual) + ")");
  }
}

std::vector<std::string> comment_block(const std::string& hash, const char* marker) {
  std::vector<std::string> out;
  for (const auto& line : provenance_lines(hash)) out.push_back(std::string(marker) + " " + line);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json run_simulate(const RunConfig& c, RunResult& run) {
  json results;
  const auto ch = resolve_channel(c);
  note_fit(c, ch, results, run);

  const TwinBeamScenario scenario{ch.spec, c.seed_amplitude, 0.0};
  const auto out = propagate(scenario);
  results["gains"] = gains_json(channel_gains(ch.spec));
  results["delta_mhz"] = c.delta_mhz;

  json noise;
  for (auto which : {NoiseChannel::probe, NoiseChannel::conjugate, NoiseChannel::difference})
    noise[std::string(to_string(which))] =
        measurement_json(measure_noise(out, kProbeMode, kConjugateMode, c.detection, which));
  results["noise"] = noise;

  if (c.probe_transmission != 1.0) {
    const double nsf =
        difference_nsf_with_probe_transmission(out, kProbeMode, kConjugateMode, c.detection, c.probe_transmission);
    results["attenuated_difference"] = {{"probe_transmission", c.probe_transmission},
                                        {"nsf_linear", nsf},
                                        {"nsf_db", to_decibel(nsf)}};
  }

  if (c.mc_samples > 0) {
    const auto mc = mc_nsf_oracle(scenario, c.mc_samples, c.rng_seed,
                                  McDetection{c.probe_transmission, c.detection.quantum_efficiency});
    results["monte_carlo"] = {{"nsf_linear", mc.nsf},
                              {"nsf_db", to_decibel(mc.nsf)},
                              {"standard_error", mc.standard_error},
                              {"samples", mc.samples},
                              {"rng_seed", c.rng_seed}};
  }
  return results;
}

json run_fit(const RunConfig& c, RunResult& run) {
  if (!c.fit)
    throw ConfigError(ConfigError::Category::constraint, {{0, "fit", "the fit command needs a [fit] table"}});
  json results;
  const auto ch = resolve_channel(c);
  note_fit(c, ch, results, run);
  results["target"] = {{"g_p", c.fit->target_g_p}, {"g_c", c.fit->target_g_c}};
  if (c.fit->target_nsf_db) results["target"]["nsf_db"] = *c.fit->target_nsf_db;
  results["gains"] = gains_json(ch.fit->gains);
  const auto out = propagate(TwinBeamScenario{ch.spec, c.seed_amplitude, 0.0});
  for (auto which : {NoiseChannel::probe, NoiseChannel::conjugate, NoiseChannel::difference})
    results["noise"][std::string(to_string(which))] =
        measurement_json(measure_noise(out, kProbeMode, kConjugateMode, c.detection, which));
  return results;
}

json run_optimize(const RunConfig& c, RunResult& run) {
  json results;
  const auto ch = resolve_channel(c);
  note_fit(c, ch, results, run);
  const auto out = propagate(TwinBeamScenario{ch.spec, c.seed_amplitude, 0.0});
  const auto opt = optimize_probe_attenuation(out, kProbeMode, kConjugateMode, c.detection, c.sweep.transmission);
  results["optimum"] = {{"t_star", opt.t_star},
                        {"attenuation", 1.0 - opt.t_star},
                        {"nsf_star_linear", opt.nsf_star},
                        {"nsf_star_db", to_decibel(opt.nsf_star)},
                        {"nsf_unattenuated_db", to_decibel(opt.nsf_unattenuated)},
                        {"used_dense_scan", opt.used_dense_scan}};
  const double at_config =
      difference_nsf_with_probe_transmission(out, kProbeMode, kConjugateMode, c.detection, c.probe_transmission);
  results["configured"] = {{"probe_transmission", c.probe_transmission}, {"nsf_db", to_decibel(at_config)}};
  return results;
}

json run_sweep(const RunConfig& c, const fs::path& dir, const std::string& hash, RunResult& run) {
  const auto rows = sweep_detuning(c.gain_curve, c.detection, c.sweep);

  std::ostringstream csv;
  for (const auto& line : comment_block(hash, "#")) csv << line << "\n";
  csv << kSweepCsvHeader << "\n";
  std::size_t squeezed = 0;
  std::size_t unreachable = 0;
  double best_db = 0.0;
  for (const auto& r : rows) {
    csv << format_number(r.delta_mhz) << ',' << format_number(r.gains.g_p) << ',' << format_number(r.gains.g_c)
        << ',' << format_number(r.gains.g_p + r.gains.g_c) << ',' << format_number(r.difference.nsf_linear) << ','
        << format_number(r.difference.nsf_db) << ',' << format_number(r.attenuation.t_star) << ','
        << format_number(to_decibel(r.attenuation.nsf_star)) << "\n";
    if (r.difference.nsf_linear < 1.0) ++squeezed;
    if (!r.fit_reachable) {
      ++unreachable;
      run.warnings.push_back("fit unreachable at delta = " + format_number(r.delta_mhz) + " MHz");
    }
    best_db = std::min(best_db, r.difference.nsf_db);
  }
  write_text(dir / "sweep.csv", csv.str());
  run.files.push_back("sweep.csv");
  if (unreachable) run.all_succeeded = false;

  json results{{"rows", rows.size()},
               {"squeezed_rows", squeezed},
               {"unreachable_fits", unreachable},
               {"min_nsf_db", best_db},
               {"fit_family", to_string(c.sweep.fit_family)},
               {"file", "sweep.csv"}};
  if (const auto w = nonamplifying_window(c.gain_curve))
    results["nonamplifying_window_mhz"] = {w->lower_mhz, w->upper_mhz};
  else
    results["nonamplifying_window_mhz"] = nullptr;
  return results;
}

json run_render(const RunConfig& c, const fs::path& dir, const std::string& hash, RunResult& run) {
  const auto& im = c.image;
  const GridGeometry grid{im.extent_um, static_cast<std::size_t>(im.resolution)};
  const Tilt tilt = tilt_for_fringes(grid, im.fringes);
  const int l_conj = 2 * im.l_pump - im.l;

  json results;
  results["oam_conserved"] = check_oam_conservation(im.l_pump, im.l, l_conj);
  results["tilt_kx_rad_per_um"] = tilt.kx;

  const struct {
    const char* name;
    int l;
  } beams[] = {{"seed", im.l}, {"probe", im.l}, {"conjugate", l_conj}};

  for (const auto& b : beams) {
    const auto field = lg_field(LGModeSpec{b.l, im.p, im.waist_um, im.wavelength_nm}, grid, im.z_um);
    const auto fringe = interfere_plane_wave(field, tilt);
    const std::string beam_file = std::string(b.name) + ".pgm";
    const std::string fork_file = std::string(b.name) + "_interference.pgm";
    write_pgm(dir / beam_file, grid, intensity(field), im.bit_depth, hash);
    write_pgm(dir / fork_file, grid, fringe.values, im.bit_depth, hash);
    run.files.push_back(beam_file);
    run.files.push_back(fork_file);

    json entry{{"l", b.l}, {"captured_power", field.captured_power}, {"clipped", field.clipped}};
    entry["extracted_charge"] = topological_charge(field, 0.5);
    entry["fork_dislocation"] = fork_dislocation(fringe, tilt);
    entry["low_fringe_count"] = fringe.low_fringe_count;
    entry["files"] = {beam_file, fork_file};
    if (field.clipped) run.warnings.push_back(std::string(b.name) + ": grid clips the mode");
    if (fringe.low_fringe_count) run.warnings.push_back(std::string(b.name) + ": fewer than 4 carrier fringes");
    results["beams"][b.name] = entry;
  }
  return results;
}

json run_presets(const fs::path& dir, RunResult& run) {
  json results;
  const struct {
    const char* file;
    RunConfig config;
  } presets[] = {{"paper-fig2.toml", preset_fig2()}, {"paper-fig3.toml", preset_fig3()}, {"paper-fig4.toml", preset_fig4()}};
  for (const auto& p : presets) {
    std::ostringstream text;
    for (const auto& line : comment_block(config_hash(p.config), "#")) text << line << "\n";
    text << to_toml(p.config);
    write_text(dir / p.file, text.str());
    run.files.push_back(p.file);
    results["presets"][p.config.scenario] = p.file;
  }
  return results;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (auto c : {Command::simulate, Command::sweep_detuning, Command::render_beams, Command::fit,
                 Command::optimize_attenuation, Command::presets})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::simulate: return "simulate";
    case Command::sweep_detuning: return "sweep-detuning";
    case Command::render_beams: return "render-beams";
    case Command::fit: return "fit";
    case Command::optimize_attenuation: return "optimize-attenuation";
    case Command::presets: return "presets";
  }
  return "unknown";
}

json describe(const ChannelSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SqueezerSpec>) {
          return {{"family", "ideal"}, {"gain", s.gain}};
        } else if constexpr (std::is_same_v<T, LumpedChannelSpec>) {
          return {{"family", "lumped"},
                  {"gain", s.gain},
                  {"eta_probe", s.eta_probe},
                  {"eta_conj", s.eta_conj},
                  {"placement", s.placement == LossPlacement::loss_before_gain ? "loss_before_gain" : "loss_after_gain"}};
        } else {
          return {{"family", "cascade"},
                  {"steps", s.steps},
                  {"gamma_total", s.gamma_total},
                  {"alpha_probe_total", s.alpha_probe_total},
                  {"alpha_conj_total", s.alpha_conj_total}};
        }
      },
      spec);
}

RunResult run_scenario(Command command, const RunConfig& config, SummaryFormat format) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const std::string hash = config_hash(config);

  RunResult run;
  json results;
  switch (command) {
    case Command::simulate: results = run_simulate(config, run); break;
    case Command::fit: results = run_fit(config, run); break;
    case Command::optimize_attenuation: results = run_optimize(config, run); break;
    case Command::sweep_detuning: results = run_sweep(config, dir, hash, run); break;
    case Command::render_beams: results = run_render(config, dir, hash, run); break;
    case Command::presets: results = run_presets(dir, run); break;
  }

  run.summary = {{"command", to_string(command)},
                 {"provenance", {{"tool_version", tool_version()}, {"config_hash", hash}, {"config", to_json(config)}}},
                 {"results", results},
                 {"succeeded", run.all_succeeded},
                 {"warnings", run.warnings}};

  const std::string summary_file = format == SummaryFormat::json ? "summary.json" : "summary.csv";
  write_text(dir / summary_file, render_summary(run.summary, format));
  run.files.push_back(summary_file);
  return run;
}

std::string render_summary(const json& summary, SummaryFormat format) {
  if (format == SummaryFormat::json) return summary.dump(2) + "\n";
  std::ostringstream out;
  const auto& prov = summary.at("provenance");
  for (const auto& line : provenance_lines(prov.at("config_hash").get<std::string>())) out << "# " << line << "\n";
  out << "key,value\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten({{"command", summary.at("command")}, {"results", summary.at("results")},
           {"succeeded", summary.at("succeeded")}},
          "", rows);
  for (const auto& [k, v] : rows) out << k << ',' << v << "\n";
  return out.str();
}

}  // namespace twinbeam
