#include <doctest.h>

#include <fstream>
#include <sstream>

#include "microrev/commands.hpp"
#include "microrev/io.hpp"
#include "support.hpp"

using namespace microrev;
using namespace microrev::app;
using doctest::Approx;
using nlohmann::json;
using test_support::scratch_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Coarse but still accurate settings so command tests stay fast.
RunConfig quick(const std::string& name) {
  RunConfig c;
  c.propagator.time_step = 1e-3;
  c.events = 20'000;
  c.output = scratch_dir(name).string();
  return c;
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.device.truncation == 51);
  CHECK(c.protocol.duration == Approx(2.0 / 3.0));
  CHECK(c.temperatures == std::vector<double>{1, 10, 20, 30, 40, 50});
  CHECK(c.designated_subspace().labels == std::vector<int>{-2, -1, 0, 1, 2});
  CHECK(c.backward_protocol().direction == Direction::backward);

  const RunConfig empty = config_from_json(json::object());
  CHECK(to_json(empty) == to_json(c));

  RunConfig custom;
  custom.device.asymmetry = -0.2;
  custom.protocol.duration = 1.0;
  custom.protocol.reversal.mirror_time = false;
  custom.full_space = true;
  custom.mode = SampleMode::exact;
  custom.ladder = LadderSource::bare_charging;
  custom.temperatures = {0.5, 7};
  custom.noise.detector.coupling_capacitance = 0.0;
  custom.seed = 42;
  const json echo = to_json(custom);
  CHECK(to_json(config_from_json(echo)) == echo);
  CHECK(config_from_json(echo).designated_subspace().size() == 51);
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(config_from_json({{"sead", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"device", {{"E_C", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"device", {{"truncation", "many"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"events", -5}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"mode", "approximate"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"subspace", "most"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);

  auto invalid = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.propagator.time_step = 0.01; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.device.truncation = 8; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.subspace = {0, 0}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.subspace = {30}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.temperatures = {10, -1}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.events = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.protocol.duration = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.noise.detector.island_capacitance = 0; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& c) { c.protocol.table = "/nonexistent.csv"; }).validate(),
                  ConfigError);

  const auto dir = scratch_dir("badconfig");
  std::ofstream(dir / "broken.json") << "{ \"seed\": ";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("io helpers") {
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv_number(-2.5e-17) == "-2.5e-17");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  const auto dir = scratch_dir("io");
  OutputSet out(dir / "nested");
  out.write_text("a.csv", CsvTable({"x", "y"}).row(std::vector<double>{1, 2}).str());
  out.write_json("b.json", {{"v", 0.1}});
  out.write_manifest("unit", {{"k", 1}}, 7);
  CHECK_THROWS_AS(out.write_manifest("unit", {}, 7), std::logic_error);
  CHECK(slurp(dir / "nested" / "a.csv") == "x,y\n1,2\n");
  CHECK(read_json(dir / "nested" / "b.json")["v"].get<double>() == 0.1);

  const json m = read_json(dir / "nested" / "manifest.json");
  CHECK(m["command"] == "unit");
  CHECK(m["seed"] == 7);
  CHECK(m["config"]["k"] == 1);
  CHECK(m.contains("timestamp"));
  CHECK(m.contains("version"));
  for (const json& entry : m["outputs"]) {
    CHECK(sha256_hex(slurp(dir / "nested" / entry["path"].get<std::string>())) ==
          entry["sha256"].get<std::string>());
  }
  CHECK(m["outputs"].size() == 2);

  CHECK_THROWS(CsvTable({"a"}).row(std::vector<double>{1, 2}));
}

TEST_CASE("spectrum command") {
  RunConfig c = quick("spectrum");
  c.spectrum_samples = 123;
  CHECK(cmd_spectrum(c).exit_code == kExitSuccess);
  const auto rows = read_csv(std::filesystem::path(c.output) / "spectrum.csv");
  REQUIRE(rows.size() == 124);
  CHECK(rows[0][0] == "t_ns");
  CHECK(rows[0].size() == 52);
  double min_gap = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][1] == "0");
    min_gap = std::min(min_gap, std::stod(rows[i][2]));
  }
  CHECK(std::filesystem::exists(std::filesystem::path(c.output) / "manifest.json"));

  RunConfig bare = quick("spectrum-bare");
  bare.device.total_josephson_energy = 0.0;
  bare.spectrum_samples = 123;
  const json s = cmd_spectrum(bare).summary;
  // Crossing parabolas: the lowest gap closes to within one sample spacing.
  CHECK(s["min_gap_01_rad_per_ns"].get<double>() < 0.2 * min_gap);
}

TEST_CASE("run command") {
  RunConfig c = quick("run-forward");
  const CommandResult fwd = cmd_run(c, Direction::forward);
  CHECK(fwd.exit_code == kExitSuccess);
  CHECK(fwd.summary["preparation_subspace_mass"].get<double>() > 0.999);
  CHECK(fwd.summary["max_leakage"].get<double>() < 2e-3);
  const std::filesystem::path dir(c.output);
  for (const char* f : {"transition_forward.csv", "transition_forward.json", "preparation.csv",
                        "preparation.json", "leakage.json", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const auto pf = read_json(dir / "transition_forward.json")["probabilities"];

  RunConfig cb = quick("run-backward");
  cmd_run(cb, Direction::backward);
  const auto pb = read_json(std::filesystem::path(cb.output) / "transition_backward.json")["probabilities"];
  double worst = 0.0;
  for (std::size_t m = 0; m < 51; ++m) {
    for (std::size_t n = 0; n < 51; ++n) {
      worst = std::max(worst, std::abs(pf[m][n].get<double>() - pb[n][m].get<double>()));
    }
  }
  CHECK(worst < 1e-3);

  RunConfig bare = quick("run-bare");
  bare.device.total_josephson_energy = 0.0;
  cmd_run(bare, Direction::forward);
  const auto rows = read_csv(std::filesystem::path(bare.output) / "transition_forward.csv");
  REQUIRE(rows.size() == 52);
  for (std::size_t m = 1; m <= 51; ++m) {
    for (std::size_t n = 1; n <= 51; ++n) CHECK(std::stod(rows[m][n]) == (m == n ? 1.0 : 0.0));
  }
}

TEST_CASE("microrev command exit status") {
  RunConfig c = quick("microrev");
  const CommandResult ok = cmd_microrev(c);
  CHECK(ok.exit_code == kExitSuccess);
  CHECK(ok.summary["max_abs"].get<double>() < 1e-3);
  CHECK(read_csv(std::filesystem::path(c.output) / "microrev_cells.csv").size() == 26);

  RunConfig control = quick("microrev-noflux");
  control.protocol.reversal.invert_flux = false;
  const CommandResult bad = cmd_microrev(control);
  CHECK(bad.exit_code == kExitThreshold);
  CHECK(bad.summary["max_abs"].get<double>() > 1e-2);

  // Shortest protocol the step-size rule allows.
  RunConfig instant = quick("microrev-instant");
  instant.protocol.duration = 1e-4;
  instant.propagator.time_step = 1e-6;
  const CommandResult zero = cmd_microrev(instant);
  CHECK(zero.exit_code == kExitSuccess);
  CHECK(zero.summary["max_abs"].get<double>() < 1e-12);

  RunConfig invalid = quick("microrev-invalid");
  invalid.propagator.time_step = 0.1;
  CHECK_THROWS_AS(cmd_microrev(invalid), ConfigError);
}

TEST_CASE("gibbs command") {
  SUBCASE("table structure") {
    RunConfig c = quick("gibbs");
    cmd_gibbs(c);
    const std::filesystem::path dir(c.output);
    const auto table = read_csv(dir / "bk_equality.csv");
    REQUIRE(table.size() == 7);
    CHECK(table[0] == std::vector<std::string>{"temperature_K", "one_minus_mean", "stderr",
                                               "events", "leaked_forward"});
    for (std::size_t i = 1; i < 7; ++i) CHECK(std::stod(table[i][0]) == c.temperatures[i - 1]);
    for (const char* f : {"work_T1K_forward.csv", "work_T50K_backward.csv", "bk_ratio_T10K.csv",
                          "bk_report.json"}) {
      CHECK(std::filesystem::exists(dir / f));
    }
    const json report = read_json(dir / "bk_report.json");
    CHECK(report["temperatures"].size() == 6);
    CHECK(report["temperatures"][0]["N"] == 20'000);
  }

  SUBCASE("uncoupled device does no work") {
    RunConfig c = quick("gibbs-bare");
    c.device.total_josephson_energy = 0.0;
    c.temperatures = {1, 50};
    cmd_gibbs(c);
    for (const char* f : {"work_T1K_forward.csv", "work_T50K_backward.csv"}) {
      const auto rows = read_csv(std::filesystem::path(c.output) / f);
      REQUIRE(rows.size() == 2);
      CHECK(rows[1][0] == "0");
    }
  }

  SUBCASE("full-space exact mode satisfies the equality") {
    RunConfig c = quick("gibbs-full");
    c.full_space = true;
    c.mode = SampleMode::exact;
    c.temperatures = {1, 10, 50};
    const CommandResult r = cmd_gibbs(c);
    for (const json& t : r.summary["temperatures"]) {
      CHECK(std::abs(t["one_minus_mean"].get<double>()) < 1e-9);
    }
  }
}

TEST_CASE("noise command") {
  RunConfig c = quick("noise");
  c.noise.samples = 301;
  const CommandResult r = cmd_noise(c);
  CHECK(std::abs(r.summary["detector"]["success_probability"].get<double>() - 0.995) <= 0.001);
  const auto trace = read_csv(std::filesystem::path(c.output) / "ratio_trace.csv");
  REQUIRE(trace.size() == 302);
  CHECK(trace[0] == std::vector<std::string>{"t_ns", "ratio", "t2_over_t1", "beta"});
  CHECK(std::filesystem::exists(std::filesystem::path(c.output) / "detector.json"));

  RunConfig off = quick("noise-decoupled");
  off.noise.detector.coupling_capacitance = 0.0;
  off.device.total_josephson_energy = 0.0;
  off.noise.samples = 51;
  const CommandResult z = cmd_noise(off);
  CHECK(z.summary["detector"]["success_probability"].get<double>() == 0.5);
  const auto zero_trace = read_csv(std::filesystem::path(off.output) / "ratio_trace.csv");
  for (std::size_t i = 1; i < zero_trace.size(); ++i) CHECK(zero_trace[i][1] == "0");
}

TEST_CASE("identical config and seed give identical payloads") {
  auto run_into = [](const std::string& name, RunConfig c) {
    c.output = scratch_dir(name).string();
    cmd_gibbs(c);
    return c;
  };
  RunConfig base = quick("det-a");
  base.temperatures = {1, 30};
  const RunConfig a = run_into("det-a", base);
  const RunConfig b = run_into("det-b", base);

  // Re-ingest the manifest echo of run a, redirected to a third directory.
  json echo = read_json(std::filesystem::path(a.output) / "manifest.json")["config"];
  RunConfig c = config_from_json(echo);
  const RunConfig replay = run_into("det-c", c);

  RunConfig reseeded = base;
  reseeded.seed += 1;
  const RunConfig d = run_into("det-d", reseeded);

  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.output)) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    CHECK(slurp(entry.path()) == slurp(std::filesystem::path(b.output) / name));
    CHECK(slurp(entry.path()) == slurp(std::filesystem::path(replay.output) / name));
    ++compared;
  }
  CHECK(compared == 8);
  CHECK(slurp(std::filesystem::path(a.output) / "bk_equality.csv") !=
        slurp(std::filesystem::path(d.output) / "bk_equality.csv"));
}
