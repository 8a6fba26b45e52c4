#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/manifest.hpp"
#include "zeno/pipeline.hpp"
#include "zeno/spin.hpp"

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

std::string error_of(const std::string& config_text) {
  try {
    zeno::parse_config_text(config_text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / tag;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("scenario names round trip") {
  const zeno::Scenario all[] = {
      zeno::Scenario::RABI_REFERENCE,    zeno::Scenario::TRAJECTORY_I,
      zeno::Scenario::TRAJECTORY_II,     zeno::Scenario::RATE_SWEEP,
      zeno::Scenario::IDEAL_QZD,         zeno::Scenario::ROUNDTRIP_TOMOGRAPHY,
      zeno::Scenario::PROJECTION_BETTER_CAVITY};
  for (auto s : all)
    CHECK(zeno::scenario_from_name(zeno::scenario_name(s)) == s);
  CHECK_THROWS_AS(zeno::scenario_from_name("NOT_A_SCENARIO"),
                  std::invalid_argument);
}

TEST_CASE("defaults are scenario aware and self-consistent") {
  const auto base = zeno::default_config();
  CHECK(base.scenario == zeno::Scenario::TRAJECTORY_I);
  CHECK(base.atom_count == 36);
  CHECK(base.pi_pulse_time == 4.65e-6);
  CHECK(base.rabi_frequency() == doctest::Approx(kPi / 4.65e-6));
  CHECK(base.measurement_rate ==
        doctest::Approx(22.5 * base.rabi_frequency()));
  CHECK_NOTHROW(zeno::validate_pipeline_config(base));

  const auto rabi = zeno::default_config(zeno::Scenario::RABI_REFERENCE);
  CHECK(rabi.measurement_rate == 0.0);
  CHECK_NOTHROW(zeno::validate_pipeline_config(rabi));

  for (auto s : {zeno::Scenario::TRAJECTORY_II, zeno::Scenario::IDEAL_QZD}) {
    const auto c = zeno::default_config(s);
    CHECK(c.trajectory == zeno::TrajectoryKind::II);
    CHECK_NOTHROW(zeno::validate_pipeline_config(c));
  }

  const auto pbc =
      zeno::default_config(zeno::Scenario::PROJECTION_BETTER_CAVITY);
  CHECK(pbc.loss.kind == zeno::LossKind::IDEAL_CAVITY);
  CHECK(pbc.loss.cooperativity ==
        doctest::Approx(100.0 * (200000.0 / 37000.0)).epsilon(1e-12));
  CHECK_NOTHROW(zeno::validate_pipeline_config(pbc));
}

TEST_CASE("blank documents yield the full defaults") {
  CHECK(zeno::parse_config_text("") == zeno::default_config());
  CHECK(zeno::parse_config_text("  \n\t ") == zeno::default_config());
}

TEST_CASE("normalized config round trips exactly") {
  const zeno::Scenario all[] = {
      zeno::Scenario::RABI_REFERENCE,    zeno::Scenario::TRAJECTORY_I,
      zeno::Scenario::TRAJECTORY_II,     zeno::Scenario::RATE_SWEEP,
      zeno::Scenario::IDEAL_QZD,         zeno::Scenario::ROUNDTRIP_TOMOGRAPHY,
      zeno::Scenario::PROJECTION_BETTER_CAVITY};
  for (auto s : all) {
    const auto c = zeno::default_config(s);
    const auto back = zeno::parse_config_text(zeno::normalized_config_json(c));
    CHECK(back == c);
  }

  // Customized config round trips too.
  auto c = zeno::default_config(zeno::Scenario::TRAJECTORY_II);
  c.seed = 99;
  c.workers = 3;
  c.atom_count = 20;
  c.tomography.shots = 175;
  c.tomography.eps01 = 0.0375;
  c.reconstruction.n_max = 6;
  c.bootstrap.replicas = 321;
  c.bootstrap.enabled = false;
  c.time_grid.snapshots_over_T = {0.5, 0.96};
  c.detection_efficiency = 0.35;
  c.output_dir = "elsewhere";
  const auto back = zeno::parse_config_text(zeno::normalized_config_json(c));
  CHECK(back == c);

  // The normalized form resolves the rate to the absolute spelling only.
  const auto doc = nlohmann::json::parse(zeno::normalized_config_json(c));
  CHECK(doc.contains("measurement_rate"));
  CHECK_FALSE(doc.contains("measurement_rate_ratio"));
  CHECK_FALSE(doc.contains("photon_flux"));
  CHECK(doc["schema_version"] == 1);
}

TEST_CASE("schema version is mandatory and checked") {
  CHECK(error_of(R"({"scenario": "TRAJECTORY_I"})")
            .find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 2})").find("unsupported") !=
        std::string::npos);
  CHECK_NOTHROW(zeno::parse_config_text(R"({"schema_version": 1})"));
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK(error_of(R"({"schema_version": 1, "bogus": 3})").find("\"bogus\"") !=
        std::string::npos);
  const std::string nested = error_of(
      R"({"schema_version": 1, "loss": {"kind": "NONE", "bogus": 3}})");
  CHECK(nested.find("loss.bogus") != std::string::npos);
  const std::string tomo = error_of(
      R"({"schema_version": 1, "tomography": {"shotz": 10}})");
  CHECK(tomo.find("tomography.shotz") != std::string::npos);
}

TEST_CASE("malformed JSON reports the line") {
  const std::string msg = error_of("{\n  \"schema_version\": 1,\n  oops\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(error_of("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("time and rate values accept unit suffixes") {
  const auto c1 = zeno::parse_config_text(
      R"({"schema_version": 1, "pi_pulse_time": "4.65 us"})");
  CHECK(c1.pi_pulse_time == doctest::Approx(4.65e-6).epsilon(1e-15));
  const auto c2 = zeno::parse_config_text(
      R"({"schema_version": 1, "pi_pulse_time": "2ms"})");
  CHECK(c2.pi_pulse_time == doctest::Approx(2e-3).epsilon(1e-15));
  const auto c3 = zeno::parse_config_text(
      R"({"schema_version": 1, "pi_pulse_time": "0.15 s"})");
  CHECK(c3.pi_pulse_time == doctest::Approx(0.15).epsilon(1e-15));

  const auto r1 = zeno::parse_config_text(
      R"({"schema_version": 1, "measurement_rate": "15.2 MHz"})");
  CHECK(r1.measurement_rate == doctest::Approx(15.2e6).epsilon(1e-15));
  const auto r2 = zeno::parse_config_text(
      R"({"schema_version": 1, "measurement_rate": "3 kHz"})");
  CHECK(r2.measurement_rate == doctest::Approx(3000.0).epsilon(1e-15));
  const auto r3 = zeno::parse_config_text(
      R"({"schema_version": 1, "measurement_rate": "250 Hz"})");
  CHECK(r3.measurement_rate == doctest::Approx(250.0).epsilon(1e-15));

  CHECK(error_of(R"({"schema_version": 1, "pi_pulse_time": "4.65 parsec"})")
            .find("suffix") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "measurement_rate": "fast"})")
            .find("measurement_rate") != std::string::npos);
}

TEST_CASE("the measurement rate has exactly one spelling") {
  // Ratio form scales with the drive.
  const auto ratio = zeno::parse_config_text(
      R"({"schema_version": 1, "measurement_rate_ratio": 10.0})");
  CHECK(ratio.measurement_rate ==
        doctest::Approx(10.0 * ratio.rabi_frequency()).epsilon(1e-12));

  // Flux form: r_m = 2Φ√T₀.
  const auto flux = zeno::parse_config_text(
      R"({"schema_version": 1, "photon_flux": 4.0e6,
          "empty_cavity_transmission": 0.25})");
  CHECK(flux.measurement_rate == doctest::Approx(2.0 * 4.0e6 * 0.5));

  // Flux needs the transmission and vice versa.
  CHECK(error_of(R"({"schema_version": 1, "photon_flux": 4.0e6})")
            .find("together") != std::string::npos);
  CHECK(error_of(
            R"({"schema_version": 1, "empty_cavity_transmission": 0.25})")
            .find("together") != std::string::npos);

  // Conflicting spellings.
  CHECK(error_of(R"({"schema_version": 1, "measurement_rate": 100.0,
                     "measurement_rate_ratio": 5.0})")
            .find("exactly one") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "measurement_rate_ratio": 5.0,
                     "photon_flux": 1e6,
                     "empty_cavity_transmission": 0.2})")
            .find("exactly one") != std::string::npos);
}

TEST_CASE("config field validation names the offending field") {
  auto check_rejects = [](const char* text, const char* field) {
    const std::string msg = error_of(text);
    CHECK(msg.find(field) != std::string::npos);
  };
  check_rejects(R"({"schema_version": 1, "atom_count": 0})", "atom_count");
  check_rejects(R"({"schema_version": 1, "measurement_rate": -5})",
                "measurement_rate");
  check_rejects(R"({"schema_version": 1, "workers": 0})", "workers");
  check_rejects(R"({"schema_version": 1, "detection_efficiency": 1.5})",
                "detection_efficiency");
  check_rejects(
      R"({"schema_version": 1, "tomography": {"eps01": 0.5}})", "eps01");
  check_rejects(
      R"({"schema_version": 1, "tomography": {"half_width": 4.0}})",
      "half_width");
  check_rejects(
      R"({"schema_version": 1, "reconstruction": {"n_max": 0}})", "n_max");
  check_rejects(
      R"({"schema_version": 1, "reconstruction": {"dilution": 0.0}})",
      "dilution");
  check_rejects(
      R"({"schema_version": 1, "bootstrap": {"replicas": 1}})", "replicas");
  check_rejects(R"({"schema_version": 1,
                    "bootstrap": {"confidence_levels": [1.0]}})",
                "confidence_levels");
  check_rejects(R"({"schema_version": 1,
                    "time_grid": {"snapshots_over_T": [2.4]}})", "snapshots");
  check_rejects(R"({"schema_version": 1, "time_grid": {"points": 1}})",
                "points");
  check_rejects(R"({"schema_version": 1, "seed": -4})", "seed");

  // Truncation cannot exceed the atom count.
  check_rejects(R"({"schema_version": 1, "atom_count": 4,
                    "reconstruction": {"n_max": 6}})", "n_max");

  // The improved-cavity scenario requires its loss model.
  auto pbc = zeno::default_config(zeno::Scenario::PROJECTION_BETTER_CAVITY);
  pbc.loss = zeno::LossModel{};
  CHECK_THROWS_AS(zeno::validate_pipeline_config(pbc), std::invalid_argument);
}

TEST_CASE("scenario time grid merges snapshots exactly") {
  const auto cfg = zeno::default_config(zeno::Scenario::TRAJECTORY_I);
  const auto grid = zeno::scenario_time_grid(cfg);
  const double T = cfg.pi_pulse_time;
  // 25 uniform points plus 5 snapshots, none colliding.
  CHECK(grid.size() == 30);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(1.3 * T).epsilon(1e-15));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  for (double s : cfg.time_grid.snapshots_over_T) {
    bool found = false;
    for (double t : grid) found = found || t == s * T;
    CHECK(found);
  }

  // The measurement-free reference sweep has no tomography snapshots.
  const auto rabi = zeno::default_config(zeno::Scenario::RABI_REFERENCE);
  CHECK(zeno::scenario_time_grid(rabi).size() == 25);

  // Snapshots already on the uniform grid do not duplicate.
  auto dup = cfg;
  dup.time_grid.snapshots_over_T = {0.65};  // = 1.3·12/24, grid point 12
  const auto g2 = zeno::scenario_time_grid(dup);
  CHECK(g2.size() == 25);
}

TEST_CASE("evolution csv writer and checker agree") {
  const int atoms = 6;
  const auto& ops = zeno::shared_spin_operators(atoms);
  zeno::ZenoConfig zc;
  zc.basis = zeno::DickeBasis{atoms};
  zc.rabi_frequency = 2 * kPi * 1e4;
  zc.measurement_rate = 10.0 * zc.rabi_frequency;
  zc.pi_pulse_time = kPi / zc.rabi_frequency;
  zc.integrator_step =
      zeno::max_integrator_step(zc.rabi_frequency, zc.measurement_rate);
  zc.time_grid = {0.0, 0.2 * zc.pi_pulse_time, 0.5 * zc.pi_pulse_time};
  zeno::TrajectorySpec spec;
  spec.kind = zeno::TrajectoryKind::I;
  const auto rec =
      zeno::run_trajectory_grid(ops, zc, spec, zeno::DynamicsModel::S1);

  const std::string csv =
      zeno::evolution_csv(rec, ops, std::vector<double>(rec.times.size(), 0.0));
  CHECK_NOTHROW(zeno::check_evolution_csv(csv));
  CHECK(csv.rfind("time_s,rho00,rho11,rho22,rho33,rho44,trace_sym,"
                  "transverse_spin,click_prob\n", 0) == 0);

  SUBCASE("header must match exactly") {
    std::string bad = csv;
    bad[0] = 'T';
    CHECK_THROWS_AS(zeno::check_evolution_csv(bad), std::invalid_argument);
  }
  SUBCASE("time must increase") {
    // Duplicate the last data line: time repeats.
    std::string bad = csv;
    const auto prev = bad.rfind('\n', bad.size() - 2);
    bad += bad.substr(prev + 1);
    CHECK_THROWS_AS(zeno::check_evolution_csv(bad), std::invalid_argument);
  }
  SUBCASE("probabilities must stay in range") {
    const std::string bad =
        "time_s,rho00,rho11,rho22,rho33,rho44,trace_sym,transverse_spin,"
        "click_prob\n"
        "0,1.5,0,0,0,0,1,0,0\n";
    CHECK_THROWS_AS(zeno::check_evolution_csv(bad), std::invalid_argument);
  }
  SUBCASE("data rows are required") {
    const std::string bad =
        "time_s,rho00,rho11,rho22,rho33,rho44,trace_sym,transverse_spin,"
        "click_prob\n";
    CHECK_THROWS_AS(zeno::check_evolution_csv(bad), std::invalid_argument);
  }
}

TEST_CASE("sha256 digests match the reference vectors") {
  CHECK(zeno::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(zeno::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  // One full block boundary (64 bytes).
  CHECK(zeno::sha256_hex(std::string(64, 'a')) ==
        "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}

TEST_CASE("run writer records exact sizes and digests") {
  const fs::path dir = fresh_dir("zeno_writer_test");
  {
    zeno::RunWriter writer(dir.string());
    writer.write("a.txt", "hello\n");
    writer.write("sub.csv", "x,y\n1,2\n");
    REQUIRE(writer.files().size() == 2);
    CHECK(writer.files()[0].name == "a.txt");
    CHECK(writer.files()[0].bytes == 6);
    CHECK(writer.files()[0].sha256 == zeno::sha256_hex("hello\n"));
    CHECK(slurp(dir / "a.txt") == "hello\n");
    CHECK(slurp(dir / "sub.csv") == "x,y\n1,2\n");
  }
  fs::remove_all(dir);
}

TEST_CASE("utc timestamps have the fixed layout") {
  const std::string ts = zeno::utc_timestamp();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[7] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts[13] == ':');
  CHECK(ts[16] == ':');
  CHECK(ts[19] == 'Z');
}

TEST_CASE("reference scenario runs end to end deterministically") {
  auto cfg = zeno::default_config(zeno::Scenario::RABI_REFERENCE);
  const fs::path dir_a = fresh_dir("zeno_run_a");
  const fs::path dir_b = fresh_dir("zeno_run_b");

  cfg.output_dir = dir_a.string();
  const auto run_a = zeno::run_scenario(cfg);
  cfg.output_dir = dir_b.string();
  const auto run_b = zeno::run_scenario(cfg);

  // Same seed, same config: every recorded output matches digest for digest.
  REQUIRE(run_a.outputs.size() == run_b.outputs.size());
  for (std::size_t i = 0; i < run_a.outputs.size(); ++i) {
    CHECK(run_a.outputs[i].name == run_b.outputs[i].name);
    CHECK(run_a.outputs[i].sha256 == run_b.outputs[i].sha256);
    CHECK(run_a.outputs[i].bytes == run_b.outputs[i].bytes);
  }

  // The manifest indexes exactly the written files, with correct digests.
  const auto manifest = nlohmann::json::parse(run_a.manifest_json);
  CHECK(manifest["schema_version"] == 1);
  CHECK(manifest["tool"] == "zenolab");
  CHECK(manifest["scenario"] == "RABI_REFERENCE");
  REQUIRE(manifest.contains("outputs"));
  REQUIRE(manifest["outputs"].size() == run_a.outputs.size());
  for (const auto& entry : manifest["outputs"]) {
    const std::string name = entry["name"];
    CHECK(name != "manifest.json");
    const std::string body = slurp(dir_a / name);
    CHECK(entry["sha256"] == zeno::sha256_hex(body));
    CHECK(entry["bytes"] == body.size());
  }
  // The embedded config reproduces the run's configuration.
  const auto embedded =
      zeno::parse_config_text(manifest["config"].dump());
  cfg.output_dir = dir_a.string();
  CHECK(embedded == cfg);

  // The reference run must beat its analytic tolerance.
  const auto report = nlohmann::json::parse(slurp(dir_a / "report.json"));
  CHECK(report["max_abs_error"].get<double>() < 1e-6);
  CHECK_NOTHROW(zeno::check_evolution_csv(slurp(dir_a / "evolution.csv")));

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("roundtrip scenario reports its reconstruction quality") {
  auto cfg = zeno::default_config(zeno::Scenario::ROUNDTRIP_TOMOGRAPHY);
  cfg.bootstrap.enabled = false;
  const fs::path dir = fresh_dir("zeno_run_rt");
  cfg.output_dir = dir.string();
  const auto run = zeno::run_scenario(cfg);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["fidelity_renormalized"].get<double>() > 0.8);
  CHECK(report["fidelity_raw"].get<double>() > 0.7);
  CHECK(report["fidelity_renormalized"].get<double>() >=
        report["fidelity_raw"].get<double>() - 1e-12);

  // Snapshot artifacts exist: dataset and reconstruction at the median
  // snapshot time.
  bool has_tomo = false, has_rec = false;
  for (const auto& f : run.outputs) {
    has_tomo = has_tomo || f.name.rfind("tomography_", 0) == 0;
    has_rec = has_rec || f.name.rfind("reconstruction_", 0) == 0;
  }
  CHECK(has_tomo);
  CHECK(has_rec);
  fs::remove_all(dir);
}
