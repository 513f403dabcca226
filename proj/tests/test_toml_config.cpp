#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "twinbeam/config.hpp"
#include "twinbeam/toml_lite.hpp"

using namespace twinbeam;
using testing_support::Gen;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  throw;
}

bool mentions(const ConfigError& e, const std::string& field, int line = -1) {
  return std::any_of(e.diagnostics().begin(), e.diagnostics().end(), [&](const ConfigDiagnostic& d) {
    return d.field == field && (line < 0 || d.line == line);
  });
}

}  // namespace

TEST_CASE("toml subset: scalars, strings, arrays, comments") {
  const auto r = toml::parse(
      "a = 1\n"
      "b = -2.5e3  # trailing comment\n"
      "c = \"x\\ty\\\"z\\u00e9\"\n"
      "d = 'C:\\raw'\n"
      "e = true\n"
      "f = [1, 2.5, \"s\", false]\n"
      "\n"
      "[t]\n"
      "g = 1_000\n"
      "h = +0.5\n");
  REQUIRE(r.issues.empty());
  const auto& root = r.document.tables.at("").entries;
  CHECK(std::get<std::int64_t>(root.at("a").value) == 1);
  CHECK(std::get<double>(root.at("b").value) == -2500.0);
  CHECK(std::get<std::string>(root.at("c").value) == "x\ty\"z\xc3\xa9");
  CHECK(std::get<std::string>(root.at("d").value) == "C:\\raw");
  CHECK(std::get<bool>(root.at("e").value));
  CHECK(std::get<std::vector<toml::Scalar>>(root.at("f").value).size() == 4);
  CHECK(root.at("b").line == 2);
  const auto& t = r.document.tables.at("t");
  CHECK(t.line == 8);
  CHECK(std::get<std::int64_t>(t.entries.at("g").value) == 1000);
  CHECK(std::get<double>(t.entries.at("h").value) == 0.5);
}

TEST_CASE("toml subset: every syntax issue is reported with its line") {
  const auto r = toml::parse(
      "a = 1\n"
      "a = 2\n"
      "b = \"unterminated\n"
      "[t]\n"
      "[t]\n"
      "[[arr]]\n"
      "c = inf\n"
      "d\n");
  std::vector<int> lines;
  for (const auto& i : r.issues) lines.push_back(i.line);
  for (int expected : {2, 3, 5, 6, 7, 8}) CHECK(std::count(lines.begin(), lines.end(), expected) >= 1);
}

TEST_CASE("empty config yields the defaults") {
  const auto c = parse_config_text("");
  CHECK(c.detection.quantum_efficiency == 0.98);
  CHECK(c.channel.steps == 800);
  CHECK(c.channel.family == "ideal");
  CHECK(c.rng_seed == 1);
  CHECK_FALSE(c.fit.has_value());
  CHECK(c.image.resolution == 256);
  CHECK(c.sweep.delta_min_mhz == -50.0);
  CHECK(c.sweep.delta_max_mhz == 16.0);
}

TEST_CASE("constraint violation names field and line") {
  const auto e = config_error("[detection]\nquantum_efficiency = 1.2\n");
  CHECK(e.category() == ConfigError::Category::constraint);
  CHECK(mentions(e, "detection.quantum_efficiency", 2));
  CHECK(std::string(e.what()).find("detection.quantum_efficiency") != std::string::npos);
}

TEST_CASE("all violations are listed together") {
  const auto e = config_error(
      "rng_seed = -3\n"
      "[detection]\n"
      "quantum_efficiency = 1.2\n"
      "[image]\n"
      "resolution = 32\n"
      "[sweep]\n"
      "delta_min_mhz = 10.0\n"
      "delta_max_mhz = -10.0\n");
  CHECK(e.category() == ConfigError::Category::constraint);
  CHECK(mentions(e, "detection.quantum_efficiency", 3));
  CHECK(mentions(e, "image.resolution", 5));
  CHECK(mentions(e, "rng_seed", 1));
  CHECK(e.diagnostics().size() >= 4);
}

TEST_CASE("unknown keys and tables are rejected") {
  const auto e = config_error("bogus = 1\n[detection]\nqe = 0.9\n[nonsense]\nx = 1\n");
  CHECK(e.category() == ConfigError::Category::constraint);
  CHECK(e.diagnostics().size() == 3);
}

TEST_CASE("type mismatches are constraint errors") {
  const auto e = config_error("[image]\nl = 1.5\n[detection]\nquantum_efficiency = \"high\"\n");
  CHECK(mentions(e, "image.l", 2));
  CHECK(mentions(e, "detection.quantum_efficiency", 4));
}

TEST_CASE("syntax errors and missing files have their own categories") {
  const auto e = config_error("a = \n[detection\n");
  CHECK(e.category() == ConfigError::Category::syntax);
  CHECK(e.diagnostics().size() == 2);
  CHECK(e.diagnostics()[0].line == 1);

  try {
    parse_config("/nonexistent/run.toml");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.category() == ConfigError::Category::missing_file);
  }
}

TEST_CASE("channel and fit sections") {
  const auto c = parse_config_text(
      "[channel]\nfamily = \"cascade\"\ngamma_total = 0.6\nalpha_probe_total = 0.4\nsteps = 400\n"
      "[fit]\nfamily = \"cascade\"\ntarget_g_p = 0.9\ntarget_g_c = 0.1\ntarget_nsf_db = -0.9\n");
  const auto spec = std::get<CascadeSpec>(c.channel.to_spec());
  CHECK(spec.steps == 400);
  CHECK(spec.gamma_total == 0.6);
  REQUIRE(c.fit.has_value());
  CHECK(c.fit->family == FitFamily::cascade);
  CHECK(c.fit->target_nsf_db == -0.9);

  CHECK_THROWS_AS(parse_config_text("[channel]\nfamily = \"magic\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[channel]\nplacement = \"sideways\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[channel]\ngain = 0.5\n"), ConfigError);
}

TEST_CASE("presets") {
  const auto fig4 = preset_fig4();
  CHECK(fig4.delta_mhz == -19.0);
  CHECK(fig4.probe_transmission == 0.33);
  REQUIRE(fig4.fit.has_value());
  CHECK(fig4.fit->target_g_p == 0.84);
  CHECK(fig4.fit->target_g_c == 0.16);

  const auto fig3 = preset_fig3();
  CHECK(fig3.sweep.delta_min_mhz == -50.0);
  CHECK(fig3.sweep.delta_max_mhz == 16.0);
  CHECK(fig3.sweep.delta_step_mhz == 1.0);

  const auto fig2 = preset_fig2();
  CHECK(fig2.mc_samples >= 100000);
  for (const auto& p : {fig2, fig3, fig4}) CHECK_NOTHROW(validate(p));
}

TEST_CASE("toml output round-trips") {
  for (const auto& c : {preset_fig2(), preset_fig3(), preset_fig4(), parse_config_text("")}) {
    const auto back = parse_config_text(to_toml(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("property: random configs round-trip and hash by content") {
  Gen gen(51);
  for (int k = 0; k < 50; ++k) {
    RunConfig c;
    c.rng_seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
    c.delta_mhz = gen.uniform(-50.0, 16.0);
    c.probe_transmission = gen.uniform(0.01, 1.0);
    c.detection.quantum_efficiency = gen.uniform(0.0, 1.0);
    c.channel.family = gen.coin() ? "lumped" : "cascade";
    c.channel.gain = gen.uniform(1.0, 10.0);
    c.channel.eta_probe = gen.uniform(0.0, 1.0);
    c.channel.gamma_total = gen.uniform(0.0, 2.0);
    c.image.l = gen.integer(-3, 3);
    if (gen.coin()) c.fit = FitConfig{FitFamily::lumped_after, gen.uniform(0.1, 2.0), gen.uniform(0.0, 1.0), std::nullopt};
    REQUIRE_NOTHROW(validate(c));
    const auto back = parse_config_text(to_toml(c));
    CHECK(to_json(back) == to_json(c));

    RunConfig moved = c;
    moved.output_dir = "elsewhere";
    CHECK(config_hash(moved) == config_hash(c));
    RunConfig changed = c;
    changed.rng_seed += 1;
    CHECK(config_hash(changed) != config_hash(c));
  }
}

TEST_CASE("parse_config reads files") {
  const auto path = std::filesystem::temp_directory_path() / "twinbeam_test_config.toml";
  {
    std::ofstream out(path);
    out << "scenario = \"file\"\n[detection]\nquantum_efficiency = 0.9\n";
  }
  const auto c = parse_config(path);
  CHECK(c.scenario == "file");
  CHECK(c.detection.quantum_efficiency == 0.9);
  std::filesystem::remove(path);
}
