// twinbeam: command-line front end for twin-beam noise simulation, detuning
// sweeps, channel fitting, attenuation optimization and LG beam rendering.
//
// Exit codes: 0 success, 2 usage error, 3 missing config file, 4 config syntax
// error, 5 config constraint violation, 6 computation error, 7 computation
// finished with a flagged result (e.g. unreachable fit target).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "twinbeam/config.hpp"
#include "twinbeam/output.hpp"
#include "twinbeam/scenario.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string format = "json";
  std::optional<int> l;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "TOML run configuration (defaults apply when omitted)");
  sub->add_option("--out", f.out_dir, "output directory (overrides output_dir)");
  sub->add_option("--seed", f.seed, "RNG seed (overrides rng_seed)");
  sub->add_option("--threads", f.threads, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  sub->add_option("--format", f.format, "summary format")->check(CLI::IsMember({"csv", "json"}));
}

int exit_code(twinbeam::ConfigError::Category c) {
  switch (c) {
    case twinbeam::ConfigError::Category::missing_file: return 3;
    case twinbeam::ConfigError::Category::syntax: return 4;
    case twinbeam::ConfigError::Category::constraint: return 5;
  }
  return 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin-beam four-wave-mixing noise simulator", "twinbeam"};
  app.set_version_flag("--version", twinbeam::tool_version());
  app.require_subcommand(1);

  CommonFlags flags;
  const char* commands[][2] = {
      {"simulate", "propagate a seeded channel and report gains and detected noise"},
      {"sweep-detuning", "sweep two-photon detuning through the gain curves and write sweep.csv"},
      {"render-beams", "render seed/probe/conjugate LG intensities and fork interferograms as PGM"},
      {"fit", "fit a channel family to target gains (and optionally a target NSF)"},
      {"optimize-attenuation", "find the probe attenuation minimizing the difference noise"},
      {"presets", "write the paper-fig2/fig3/fig4 preset configurations"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    add_common(sub, flags);
    if (std::string(c[0]) == "render-beams")
      sub->add_option("--l", flags.l, "seed topological charge (overrides image.l)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  const auto command = twinbeam::parse_command(sub->get_name());

  try {
    twinbeam::RunConfig config =
        flags.config_path.empty() ? twinbeam::parse_config_text("") : twinbeam::parse_config(flags.config_path);
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.seed) config.rng_seed = *flags.seed;
    if (flags.l) config.image.l = *flags.l;
    twinbeam::validate(config);
    if (flags.threads > 0) omp_set_num_threads(flags.threads);

    const auto format = flags.format == "csv" ? twinbeam::SummaryFormat::csv : twinbeam::SummaryFormat::json;
    const auto result = twinbeam::run_scenario(*command, config, format);
    std::cout << twinbeam::render_summary(result.summary, format);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return result.all_succeeded ? 0 : 7;
  } catch (const twinbeam::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  }
}
