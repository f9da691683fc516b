// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "kickrot/error.hpp"
#include "kickrot/export.hpp"
#include "kickrot/run.hpp"
#include "kickrot/run_config.hpp"

namespace kickrot {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kickrot_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string config_key(const std::string& text) {
  try {
    static_cast<void>(parse_run_config(text).validate());
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(FormatReal, SeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(format_real(1e-300), "1e-300");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.33333333333333331");
  const double x = 2.0 / 3.0;
  EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(Table, SortsByKeyColumnsAndWritesHeader) {
  Table t;
  t.columns = {"P", "omega[rad]", "class"};
  t.key_columns = 2;
  t.add({2.0, 0.5, std::string("edge")});
  t.add({1.0, 0.7, std::string("extended")});
  t.add({1.0, -0.2, std::string("artifact")});
  t.sort();
  EXPECT_EQ(t.str(), "P\tomega[rad]\tclass\n1\t-0.20000000000000001\tartifact\n1\t0.69999999999999996\textended\n2\t0.5\tedge\n");
  EXPECT_THROW(t.add({1.0}), std::invalid_argument);
}

TEST(RunConfig, ParsesFullDocument) {
  const RunConfig c = parse_run_config(R"({
    "scenario": "alignment-ft", "output": "out", "threads": 2,
    "basis": {"M": 0, "parity": "both", "J_max": 160},
    "train": {"N": 10, "shape": "gaussian", "fwhm_fs": 500, "peak_intensity_W_cm2": 1.5e12, "tau": "1/3"},
    "spectrum": {"B_cm": 0.11415, "D_cm": 4.03e-8, "delta_alpha_A3": 6.30},
    "temperature_K": 5,
    "sampling": {"pulse_counts": [2, 4], "broadening_cm": 0.5}
  })");
  EXPECT_EQ(c.scenario, Scenario::alignment_ft);
  EXPECT_EQ(c.basis.parities.size(), 2u);
  EXPECT_EQ(c.train.shape, PulseShape::gaussian);
  EXPECT_NEAR(c.kick_strength(), 9.9958, 1e-3);
  EXPECT_NEAR(c.spectrum.spectrum().epsilon(), 4.03e-8 / (2.0 * 0.11415), 1e-18);
  EXPECT_NO_THROW(c.validate());
  const RunConfig again = parse_run_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(RunConfig, ErrorsNameTheKey) {
  EXPECT_EQ(config_key(R"({"train": {"P": 3}, "basis": {"J_max": 30}})"), "basis.J_max");
  EXPECT_EQ(config_key(R"({"train": {"P": 3}, "basis": {"colour": 1}})"), "basis.colour");
  EXPECT_EQ(config_key(R"({"train": {"P": "x"}})"), "train.P");
  EXPECT_EQ(config_key(R"({"train": {"P": 3, "tau": "1/0"}})"), "train.tau");
  EXPECT_EQ(config_key(R"({"train": {"P_grid": []}})"), "train.P_grid");
  EXPECT_EQ(config_key(R"({"scenario": "spectrum-scan", "train": {"P_grid": [2, 1]}})"), "train.P_grid");
  EXPECT_EQ(config_key(R"({"train": {"P": 3}, "spectrum": {"epsilon": 1e-3}})"), "spectrum.epsilon");
  EXPECT_EQ(config_key(R"({"scenario": "dynamics", "train": {"P": 3}, "temperature_K": 5})"), "spectrum.B_cm");
  EXPECT_EQ(config_key(R"({"scenario": "dynamics", "train": {"P": 3}, "initial_J": [600]})"), "initial_J");
  EXPECT_EQ(config_key(R"({"scenario": "nope"})"), "scenario");
  EXPECT_EQ(config_key(R"({"train": {"P": 3}})"), "<none>");
}

TEST(RunConfig, GridSyntax) {
  const auto range = parse_grid("0:10:0.1", "train.P_grid");
  ASSERT_EQ(range.size(), 101u);
  EXPECT_DOUBLE_EQ(range.back(), 10.0);
  EXPECT_EQ(parse_grid("1,2.5,4", "k"), (std::vector<double>{1.0, 2.5, 4.0}));
  EXPECT_TRUE(parse_grid("", "k").empty());
  EXPECT_THROW(static_cast<void>(parse_grid("1:2", "k")), ConfigError);
  EXPECT_THROW(static_cast<void>(parse_grid("a,b", "k")), ConfigError);
}

TEST(Run, EmptyGridWritesNothing) {
  RunConfig c;
  c.scenario = Scenario::spectrum_scan;
  c.output = scratch("empty");
  try {
    static_cast<void>(run(c));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "train.P_grid");
  }
  EXPECT_FALSE(fs::exists(c.output));
}

TEST(Run, StatesOutputsAndDeterminism) {
  RunConfig c = parse_run_config(R"({"scenario": "states", "train": {"P": 3}, "basis": {"J_max": 256}})");
  c.output = scratch("states_a");
  const RunResult a = run(c);
  c.output = scratch("states_b");
  const RunResult b = run(c);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    if (a.files[i].filename() == "manifest.json") continue;
    EXPECT_EQ(slurp(a.files[i]), slurp(b.files[i])) << a.files[i];
  }
  const std::string levels = slurp(a.files[0]);
  EXPECT_EQ(levels.substr(0, levels.find('\n')), "P\tparity\tomega[rad]\tclass\tlower_weight\tupper_weight");
  const auto manifest = nlohmann::json::parse(slurp(c.output / "manifest.json"));
  EXPECT_EQ(manifest["version"], kLibraryVersion);
  EXPECT_EQ(manifest["config"]["basis"]["J_max"], 256);
  EXPECT_DOUBLE_EQ(manifest["resolved"]["P"].get<double>(), 3.0);
  EXPECT_TRUE(manifest.contains("wall_time_s"));
}

TEST(Run, ThreadCountDoesNotChangeOutput) {
  RunConfig c = parse_run_config(
      R"({"scenario": "overlap-scan", "train": {"P_grid": "1:3:1"}, "basis": {"J_max": 200}, "initial_J": [0, 40]})");
  c.output = scratch("overlap_1");
  const RunResult one = run(c);
  c.threads = 3;
  c.output = scratch("overlap_3");
  const RunResult three = run(c);
  EXPECT_EQ(slurp(one.files[0]), slurp(three.files[0]));
}

TEST(Run, ManifestTracksEveryKey) {
  const std::string base = to_json(parse_run_config(R"({"train": {"P": 3}})"));
  const char* variants[] = {
      R"({"train": {"P": 3}, "basis": {"M": 1}})",         R"({"train": {"P": 3}, "basis": {"J_max": 300}})",
      R"({"train": {"P": 3}, "basis": {"parity": "odd"}})", R"({"train": {"P": 3.5}})",
      R"({"train": {"P": 3, "tau": "1/2"}})",               R"({"train": {"P": 3, "N": 7}})",
      R"({"train": {"P": 3}, "spectrum": {"epsilon": 1e-9}})", R"({"train": {"P": 3}, "threads": 4})",
      R"({"train": {"P": 3}, "sampling": {"omega_bins": 64}})", R"({"train": {"P": 3}, "initial_J": [2]})",
      R"({"train": {"P": 3}, "sampling": {"zero_padding": 2}})", R"({"train": {"P": 3}, "output": "x"})"};
  for (const char* v : variants) EXPECT_NE(to_json(parse_run_config(v)), base) << v;
}

TEST(Run, DynamicsAndPlanarTables) {
  RunConfig c = parse_run_config(
      R"({"scenario": "dynamics", "train": {"P": 3, "N": 5}, "basis": {"J_max": 200}, "initial_J": [0, 1]})");
  c.output = scratch("dynamics");
  const RunResult r = run(c);
  const std::string pop = slurp(r.files[0]);
  EXPECT_EQ(pop.substr(0, pop.find('\n')), "J0\tpulse_index\tJ\tpopulation");
  c = parse_run_config(R"({"scenario": "planar-ref", "train": {"P_grid": [1, 2], "tau": "1/2"}, "sampling": {"planar_grid": 8}})");
  c.output = scratch("planar");
  const RunResult p = run(c);
  const std::string planar = slurp(p.files[0]);
  EXPECT_EQ(std::count(planar.begin(), planar.end(), '\n'), 1 + 2 * 17);
}

}  // namespace
}  // namespace kickrot
