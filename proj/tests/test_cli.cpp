#include "doctest.h"

#include <numbers>

#include <filesystem>
#include <fstream>

#include "tebd/cli/commands.hpp"
#include "tebd/cli/config.hpp"
#include "tebd/cli/csv.hpp"
#include "tebd/cli/manifest.hpp"
#include "tebd/snapshot.hpp"

using namespace tebd;
using namespace tebd::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_quench_config() {
  return json{
      {"model", {{"name", "ferromagnet"}, {"b_field", 1.0}, {"j_coupling", 1.0}}},
      {"n", 6},
      {"d", 2},
      {"initial_state",
       {{"kind", "product"}, {"configuration", {1, 1, 0, 0, 0, 0}}}},
      {"evolution", {{"axis", "real"}, {"time", 0.5}, {"delta", 0.01}, {"order", 2}}},
      {"truncation", {{"chi_max", 8}, {"weight_tol", 0.0}}},
      {"samplers", {{"interval_steps", 10}, {"bonds", {2}}, {"observables", {"energy"}}}},
      {"seed", 5},
  };
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("tebd_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config parsing is fail-closed") {
  CHECK_NOTHROW(parse_config(minimal_quench_config()));

  json bad_top = minimal_quench_config();
  bad_top["surprise"] = 1;
  CHECK_THROWS_AS(parse_config(bad_top), ConfigError);

  json bad_nested = minimal_quench_config();
  bad_nested["truncation"]["chi"] = 8;  // misspelled key
  CHECK_THROWS_AS(parse_config(bad_nested), ConfigError);

  json bad_value = minimal_quench_config();
  bad_value["truncation"]["chi_max"] = 0;
  CHECK_THROWS_AS(parse_config(bad_value), ConfigError);

  json bad_bond = minimal_quench_config();
  bad_bond["samplers"]["bonds"] = {9};
  CHECK_THROWS_AS(parse_config(bad_bond), ConfigError);

  json bad_config_len = minimal_quench_config();
  bad_config_len["initial_state"]["configuration"] = {0, 0};
  CHECK_THROWS_AS(parse_config(bad_config_len), ConfigError);
}

TEST_CASE("empty delta-tau stage list is a validation error") {
  json cfg = minimal_quench_config();
  cfg["evolution"] = {{"axis", "imaginary"},
                      {"delta_tau_schedule", json::array()},
                      {"order", 2}};
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);
}

TEST_CASE("imaginary-time knobs parse into the criterion") {
  json cfg = minimal_quench_config();
  cfg["evolution"] = {{"axis", "imaginary"},
                      {"delta_tau_schedule", {0.1, 0.01}},
                      {"overlap_tol", 1e-8},
                      {"probe_interval", 0.5},
                      {"max_steps_per_stage", 123}};
  ExperimentConfig parsed = parse_config(cfg);
  REQUIRE(parsed.imaginary_evolution.has_value());
  CHECK(parsed.imaginary_evolution->overlap_tol == 1e-8);
  CHECK(parsed.imaginary_evolution->probe_interval == 0.5);
  CHECK(parsed.imaginary_evolution->max_steps_per_stage == 123);
}

TEST_CASE("unknown oracle and operator names are rejected") {
  CHECK_THROWS_AS(parse_oracle_name("approximate"), ConfigError);
  CHECK_THROWS_AS(named_operator("sigma_w"), ConfigError);
  CHECK(parse_oracle_name("two-magnon") == OracleKind::two_magnon);
}

TEST_CASE("explicit-matrix models build and validate") {
  json cfg = minimal_quench_config();
  cfg["model"] = {{"name", "explicit"},
                  {"k1",
                   {json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})}),
                                 json::array({json::array({0.0, 0.0}), json::array({-1.0, 0.0})})})}},
                  {"k2", json::array()}};
  // wrong term counts surface at build time
  ExperimentConfig parsed = parse_config(cfg);
  CHECK_THROWS_AS(parsed.build_hamiltonian(), std::invalid_argument);
}

TEST_CASE("quench runs are deterministic byte for byte") {
  ExperimentConfig cfg = parse_config(minimal_quench_config());
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  REQUIRE(cmd_quench(cfg, {a.string(), "", 1}) == kOk);
  REQUIRE(cmd_quench(cfg, {b.string(), "", 1}) == kOk);
  for (const char* f : {"spectrum.csv", "chi.csv", "observables.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
  CHECK(fs::exists(a / "manifest.json"));
}

TEST_CASE("halt, checkpoint and resume reproduce the full trajectory exactly") {
  ExperimentConfig full_cfg = parse_config(minimal_quench_config());
  const fs::path full_dir = fresh_dir("resume_full");
  REQUIRE(cmd_quench(full_cfg, {full_dir.string(), "", 1}) == kOk);

  json halted = minimal_quench_config();
  halted["evolution"]["halt_after_steps"] = 23;
  const fs::path part_dir = fresh_dir("resume_part");
  REQUIRE(cmd_quench(parse_config(halted), {part_dir.string(), "", 1}) == kOk);
  REQUIRE(fs::exists(part_dir / "checkpoint.chk"));

  REQUIRE(cmd_quench(full_cfg,
                     {part_dir.string(), (part_dir / "checkpoint.chk").string(), 1}) == kOk);
  for (const char* f : {"spectrum.csv", "chi.csv", "observables.csv"})
    CHECK(slurp(full_dir / f) == slurp(part_dir / f));
}

TEST_CASE("checkpoints round-trip") {
  ExperimentConfig cfg = parse_config(minimal_quench_config());
  Checkpoint chk;
  chk.step = 17;
  chk.t = 0.17;
  chk.cum_discarded = 3.5e-12;
  chk.state = cfg.build_initial_state();

  const fs::path dir = fresh_dir("chk");
  save_checkpoint((dir / "c.chk").string(), chk);
  Checkpoint back = load_checkpoint((dir / "c.chk").string());
  CHECK(back.step == 17);
  CHECK(back.t == 0.17);
  CHECK(back.cum_discarded == 3.5e-12);
  CHECK(back.state.size() == 6);
  for (int l = 0; l < 6; ++l)
    CHECK(back.state.gamma(l).data() == chk.state.gamma(l).data());
}

TEST_CASE("zero-time quench emits initial diagnostics and succeeds") {
  json cfg = minimal_quench_config();
  cfg["evolution"]["time"] = 0.0;
  const fs::path dir = fresh_dir("t0");
  REQUIRE(cmd_quench(parse_config(cfg), {dir.string(), "", 1}) == kOk);
  const std::string chi = slurp(dir / "chi.csv");
  CHECK(chi == "t,max_chi\n0,1\n");
}

TEST_CASE("ground command reports non-convergence with retained outputs") {
  json cfg = minimal_quench_config();
  cfg["model"] = {{"name", "transverse_ising"}, {"field", 1.0}, {"coupling", 1.0}};
  cfg["initial_state"] = {{"kind", "product_tilted"}, {"theta", 0.35}};
  cfg["evolution"] = {{"axis", "imaginary"},
                      {"delta_tau_schedule", {0.1}},
                      {"order", 2},
                      {"max_steps_per_stage", 20}};
  cfg.erase("samplers");

  const fs::path dir = fresh_dir("noconv");
  CHECK(cmd_ground(parse_config(cfg), {dir.string(), "", 1}) == kNonConvergence);
  CHECK(fs::exists(dir / "ground_state.snap"));
  CHECK(fs::exists(dir / "energy_trace.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("ground command converges and snapshots a loadable state") {
  json cfg = minimal_quench_config();
  cfg["initial_state"] = {{"kind", "product_tilted"}, {"theta", 0.3}};
  cfg["evolution"] = {{"axis", "imaginary"}, {"delta_tau_schedule", {0.1, 0.01}}, {"order", 2}};
  cfg.erase("samplers");

  const fs::path dir = fresh_dir("ground_ok");
  REQUIRE(cmd_ground(parse_config(cfg), {dir.string(), "", 1}) == kOk);
  VidalMps state = load_snapshot((dir / "ground_state.snap").string());
  CHECK(state.size() == 6);
  CHECK(std::abs(state.amplitude({0, 0, 0, 0, 0, 0})) > 0.999);
}

TEST_CASE("synthetic correlator input produces the expected spectral peak") {
  const fs::path dir = fresh_dir("synth");
  const int nx = 6, nt = 8;
  const double dt = 0.25;
  const double k0 = 2 * std::numbers::pi * 2 / nx;
  const double w0 = 2 * std::numbers::pi * 3 / (nt * dt);
  {
    CsvWriter grid((dir / "input.csv").string(), {"x", "t", "re", "im"}, false);
    for (int j = 0; j < nx; ++j)
      for (int m = 0; m < nt; ++m) {
        const Complex v = std::exp(Complex(0, k0 * j - w0 * m * dt));
        grid.row({std::to_string(j), format_double(m * dt), format_double(v.real()),
                  format_double(v.imag())});
      }
  }

  json cfg = minimal_quench_config();
  cfg.erase("evolution");
  cfg.erase("samplers");
  cfg["correlator"] = {{"input_csv", (dir / "input.csv").string()}, {"window", "none"}};
  REQUIRE(cmd_correlator(parse_config(cfg), {dir.string(), "", 1}) == kOk);

  // The peak row carries |S| = nx * nt; every other row is numerically zero.
  std::ifstream sf(dir / "structure_factor.csv");
  std::string line;
  std::getline(sf, line);
  REQUIRE(line == "k,omega,re,abs");
  int peaks = 0;
  while (std::getline(sf, line)) {
    double k, w, re, abs_v;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &k, &w, &re, &abs_v) == 4);
    if (abs_v > 1.0) {
      ++peaks;
      CHECK(k == doctest::Approx(k0).epsilon(1e-12));
      CHECK(w == doctest::Approx(w0).epsilon(1e-12));
      CHECK(abs_v == doctest::Approx(48.0).epsilon(1e-9));
    }
  }
  CHECK(peaks == 1);
}

TEST_CASE("correlator command writes both grids from a snapshot ground state") {
  const fs::path dir = fresh_dir("corr");
  json cfg = minimal_quench_config();
  cfg.erase("evolution");
  cfg.erase("samplers");
  cfg["n"] = 6;
  cfg["initial_state"] = {{"kind", "product"}, {"configuration", {0, 0, 0, 0, 0, 0}}};

  const fs::path snap = dir / "gs.snap";
  save_snapshot(snap.string(), parse_config(cfg).build_initial_state());
  cfg["correlator"] = {{"operator", "sigma_minus"},
                       {"t_max", 0.2},
                       {"delta", 0.01},
                       {"sample_every", 5},
                       {"ground_snapshot", snap.string()}};
  REQUIRE(cmd_correlator(parse_config(cfg), {dir.string(), "", 1}) == kOk);
  CHECK(fs::exists(dir / "correlator.csv"));
  CHECK(fs::exists(dir / "structure_factor.csv"));

  // Annihilating operator is reported as invalid input.
  cfg["correlator"]["operator"] = "sigma_plus";
  CHECK_THROWS_AS(cmd_correlator(parse_config(cfg), {fresh_dir("corr2").string(), "", 1}),
                  std::invalid_argument);
}

TEST_CASE("single-point scaling sweep writes one row") {
  json cfg = minimal_quench_config();
  cfg.erase("evolution");
  cfg.erase("samplers");
  cfg["scaling"] = {{"n_list", {12}},
                    {"chi_list", {4}},
                    {"delta", 0.05},
                    {"steps", 5},
                    {"warmup_layers", 4}};
  const fs::path dir = fresh_dir("scaling");
  REQUIRE(cmd_scaling(parse_config(cfg), {dir.string(), "", 1}) == kOk);

  std::ifstream in(dir / "scaling.csv");
  std::string header, row, extra;
  REQUIRE(std::getline(in, header));
  CHECK(header == "n,chi,delta,steps,seconds");
  REQUIRE(std::getline(in, row));
  CHECK(row.substr(0, 5) == "12,4,");
  CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("manifest lists produced files with checksums") {
  ExperimentConfig cfg = parse_config(minimal_quench_config());
  const fs::path dir = fresh_dir("manifest");
  REQUIRE(cmd_quench(cfg, {dir.string(), "", 1}) == kOk);

  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("command") == "quench");
  CHECK(manifest.contains("started_at"));
  bool found_chi = false;
  for (const auto& f : manifest.at("files")) {
    if (f.at("name") == "chi.csv") {
      found_chi = true;
      char expected[32];
      std::snprintf(expected, sizeof expected, "%016llx",
                    static_cast<unsigned long long>(fnv1a64_file((dir / "chi.csv").string())));
      CHECK(f.at("fnv1a64") == expected);
    }
  }
  CHECK(found_chi);
}

TEST_CASE("threaded layer application matches single-threaded output") {
  json cfg_json = minimal_quench_config();
  cfg_json["n"] = 10;
  cfg_json["initial_state"] = {{"kind", "product"},
                               {"configuration", {1, 1, 0, 0, 0, 0, 0, 0, 0, 0}}};
  cfg_json["samplers"] = {{"interval_steps", 10}, {"bonds", {4}}};
  ExperimentConfig cfg = parse_config(cfg_json);

  const fs::path a = fresh_dir("thr1"), b = fresh_dir("thr4");
  REQUIRE(cmd_quench(cfg, {a.string(), "", 1}) == kOk);
  REQUIRE(cmd_quench(cfg, {b.string(), "", 4}) == kOk);
  // Disjoint bonds mean thread count cannot change any number.
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
  CHECK(slurp(a / "chi.csv") == slurp(b / "chi.csv"));
}
