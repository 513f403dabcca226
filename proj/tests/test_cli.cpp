#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path kWork = fs::temp_directory_path() / "twinbeam_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome run(const std::string& args) {
  fs::create_directories(kWork);
  const auto out = kWork / "stdout.txt", err = kWork / "stderr.txt";
  const std::string cmd = std::string(TWINBEAM_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const auto p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

std::string out_dir(const std::string& name) {
  const auto p = kWork / name;
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run("--version").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("simulate --format xml").code == 2);
  CHECK(run("simulate --threads -1").code == 2);
}

TEST_CASE("config error categories map to exit codes") {
  CHECK(run("simulate --config " + (kWork / "absent.toml").string()).code == 3);

  const auto syntax = run("simulate --config " + write_config("syntax.toml", "a = \n").string());
  CHECK(syntax.code == 4);
  CHECK(syntax.err.find("line 1") != std::string::npos);

  const auto bad = run("simulate --config " +
                       write_config("bad.toml", "[detection]\nquantum_efficiency = 1.2\n[image]\nresolution = 8\n").string());
  CHECK(bad.code == 5);
  CHECK(bad.err.find("detection.quantum_efficiency") != std::string::npos);
  CHECK(bad.err.find("image.resolution") != std::string::npos);
  CHECK(bad.out.empty());
}

TEST_CASE("simulate prints a JSON summary") {
  const auto cfg = write_config("ideal.toml", "[channel]\ngain = 6.260869565217391\n[detection]\nquantum_efficiency = 1.0\n");
  const auto r = run("simulate --config " + cfg.string() + " --out " + out_dir("sim"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("results").at("noise").at("difference").at("nsf_db").get<double>() == doctest::Approx(-10.6).epsilon(0.002));
  CHECK(slurp(fs::path(kWork / "sim" / "summary.json")) == r.out);
}

TEST_CASE("csv summary") {
  const auto r = run("optimize-attenuation --format csv --out " + out_dir("opt"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# twinbeam ", 0) == 0);
  CHECK(r.out.find("results.optimum.t_star,0.82289") != std::string::npos);
}

TEST_CASE("flagged results exit with 7") {
  const auto cfg = write_config("unreachable.toml", "[fit]\ntarget_g_p = 3.0\ntarget_g_c = 1.0\n");
  const auto r = run("fit --config " + cfg.string() + " --out " + out_dir("fit"));
  CHECK(r.code == 7);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(run("fit --out " + out_dir("fit_none")).code == 5);
}

TEST_CASE("thread count does not change outputs") {
  const auto cfg = write_config("sweep.toml", "[sweep]\ndelta_min_mhz = -28.0\ndelta_max_mhz = -7.0\n");
  REQUIRE(run("sweep-detuning --threads 1 --config " + cfg.string() + " --out " + out_dir("t1")).code == 0);
  REQUIRE(run("sweep-detuning --threads 4 --config " + cfg.string() + " --out " + out_dir("t4")).code == 0);
  CHECK(slurp(kWork / "t1" / "sweep.csv") == slurp(kWork / "t4" / "sweep.csv"));
  CHECK(slurp(kWork / "t1" / "summary.json") == slurp(kWork / "t4" / "summary.json"));
}

TEST_CASE("seed and charge overrides") {
  const auto a = nlohmann::json::parse(run("simulate --seed 5 --out " + out_dir("s5")).out);
  const auto b = nlohmann::json::parse(run("simulate --seed 6 --out " + out_dir("s6")).out);
  CHECK(a.at("provenance").at("config").at("rng_seed") == 5);
  CHECK(a.at("provenance").at("config_hash") != b.at("provenance").at("config_hash"));

  const auto r = run("render-beams --l 2 --out " + out_dir("l2"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("results").at("beams").at("probe").at("extracted_charge") == 2);
  CHECK(j.at("results").at("beams").at("conjugate").at("extracted_charge") == -2);
  CHECK(fs::exists(kWork / "l2" / "conjugate_interference.pgm"));
}

TEST_CASE("presets then simulate") {
  const auto dir = out_dir("presets");
  REQUIRE(run("presets --out " + dir).code == 0);
  const auto r = run("simulate --config " + (fs::path(dir) / "paper-fig4.toml").string() + " --out " + out_dir("fig4"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("results").at("noise").at("difference").at("nsf_db").get<double>() < 0.0);
}
