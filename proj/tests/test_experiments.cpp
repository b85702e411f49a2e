#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "vbsq/experiments.hpp"
#include "vbsq/verify.hpp"

using namespace vbsq;

namespace {

std::string error_field(const Json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string run_error_field(const Json& j) {
  try {
    run_experiment(config_from_json(j));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// Reduced parameters so that every experiment finishes in well under a second.
Json small(const std::string& name) {
  if (name == "fig3") return {{"experiment", name}, {"l_list", {12, 16}}, {"samples", 3}, {"max_fraction", 0.5}};
  if (name == "fig_sa1") return {{"experiment", name}, {"l_list", {10}}, {"samples", 2}, {"max_fraction", 0.4}};
  if (name == "fig_ranu") return {{"experiment", name}, {"l", 60}, {"counts", {1, 3}}, {"min_distances", {0, 4}}, {"samples", 2}};
  if (name == "closed_forms") return {{"experiment", name}, {"n_list", {3}}, {"l", 40}};
  if (name == "twist_scan") return {{"experiment", name}, {"f_points", 3}, {"l0", 32}, {"levels", 3}, {"l_finite", 20}};
  if (name == "energy_syndromes") return {{"experiment", name}, {"n_list", {3}}, {"virtual_samples", 2}, {"l", 20}};
  if (name == "scaling_laws") return {{"experiment", name}, {"l", 16}, {"samples", 4}, {"r_max", 16}};
  if (name == "table_sa1") return {{"experiment", name}, {"l", 40}, {"site", 10}};
  return {{"experiment", name}};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Config, DefaultsFilledIn) {
  ExperimentConfig c = config_from_json({{"experiment", "fig3"}, {"seed", 9}, {"samples", 4}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.params["samples"], 4);
  EXPECT_EQ(c.params["n_sun"], 3);
  EXPECT_EQ(c.params["l_list"].size(), 8u);
}

TEST(Config, RejectsWithFieldName) {
  EXPECT_EQ(error_field({{"experiment", "fig4"}}), "experiment");
  EXPECT_EQ(error_field({{"seed", 1}}), "experiment");
  EXPECT_EQ(error_field({{"experiment", "fig3"}, {"sample", 3}}), "sample");
  EXPECT_EQ(error_field({{"experiment", "fig3"}, {"seed", -1}}), "seed");
  EXPECT_EQ(error_field({{"experiment", "fig3"}, {"threads", 0}}), "threads");
  EXPECT_EQ(error_field(Json::array()), "config");
}

TEST(Config, RejectsBadValuesAtRun) {
  EXPECT_EQ(run_error_field({{"experiment", "fig3"}, {"samples", "many"}}), "samples");
  EXPECT_EQ(run_error_field({{"experiment", "fig3"}, {"n_sun", 1}}), "n_sun");
  EXPECT_EQ(run_error_field({{"experiment", "fig3"}, {"l_list", Json::array()}}), "l_list");
  EXPECT_EQ(run_error_field({{"experiment", "fig3"}, {"max_fraction", 1.5}}), "max_fraction");
  EXPECT_EQ(run_error_field({{"experiment", "scaling_laws"}, {"r_max", 41}}), "r_max");
}

TEST(Config, RejectsInfeasibleDilutePlacement) {
  EXPECT_EQ(run_error_field({{"experiment", "fig_ranu"}, {"l", 100}, {"counts", {10}}, {"min_distances", {10}}}), "counts");
}

TEST(Config, LoadFromFileAndBadJson) {
  auto dir = std::filesystem::temp_directory_path() / "vbsq_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "ok.json") << R"({"experiment": "table_sa1", "seed": 3})";
  std::ofstream(dir / "bad.json") << R"({"experiment": )";
  EXPECT_EQ(load_config(dir / "ok.json").seed, 3u);
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Format, DoubleRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 2000; ++i) {
    double x = std::pow(10.0, u(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Format, CsvLayout) {
  Table t{{"a", "b", "c"}, {{Cell{std::int64_t{3}}, Cell{0.25}, Cell{std::string("u_LL")}}}};
  EXPECT_EQ(format_csv(t), "a,b,c\n3,0.25,u_LL\n");
}

TEST(Format, Fnv1aReferenceValues) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(fnv1a("foobar")), "85944171f73967e8");
}

TEST(Experiments, EveryExperimentRunsSmall) {
  for (const auto& name : experiment_names()) {
    SCOPED_TRACE(name);
    ExperimentResult r = run_experiment(config_from_json(small(name)));
    ASSERT_FALSE(r.table.rows.empty());
    for (const auto& row : r.table.rows) EXPECT_EQ(row.size(), r.table.columns.size());
    EXPECT_FALSE(r.plot.empty());
    EXPECT_FALSE(r.stages.empty());
  }
}

TEST(Experiments, ClosedFormResidualsSmall) {
  EXPECT_LT(run_experiment(config_from_json(small("closed_forms"))).summary["max_residual"].get<double>(), 1e-9);
  EXPECT_LT(run_experiment(config_from_json(small("energy_syndromes"))).summary["max_residual"].get<double>(), 1e-9);
}

TEST(Experiments, CsvIndependentOfThreads) {
  for (const char* name : {"fig3", "fig_ranu"}) {
    ExperimentConfig c = config_from_json(small(name));
    c.seed = 17;
    std::string a = format_csv(run_experiment(c).table);
    c.threads = 4;
    EXPECT_EQ(a, format_csv(run_experiment(c).table)) << name;
  }
}

TEST(Experiments, SeedChangesSamples) {
  ExperimentConfig c = config_from_json(small("fig3"));
  std::string a = format_csv(run_experiment(c).table);
  c.seed = 2;
  EXPECT_NE(a, format_csv(run_experiment(c).table));
}

TEST(Manifest, ChecksumsAndConfigRoundTrip) {
  ExperimentConfig c = config_from_json(small("twist_scan"));
  c.output_dir = (std::filesystem::temp_directory_path() / "vbsq_manifest_test").string();
  std::ostringstream out, err;
  ASSERT_EQ(run_to_directory(c, out, err), 0) << err.str();
  std::filesystem::path dir(c.output_dir);
  std::string csv = slurp(dir / "results.csv");
  Json m = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot.gp"));
  EXPECT_EQ(m["version"], kArtifactVersion);

  std::string body = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(m["body_checksum"], hex64(fnv1a(body)));
  std::istringstream lines(body);
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) EXPECT_EQ(m["row_checksums"][i++], hex64(fnv1a(line + "\n")));
  EXPECT_EQ(i, m["row_count"].get<std::size_t>());

  ExperimentConfig back = config_from_json(m);
  EXPECT_EQ(config_echo(back), config_echo(c));
  EXPECT_EQ(format_csv(run_experiment(back).table), csv);
}

TEST(Manifest, UnwritableOutputReported) {
  ExperimentConfig c = config_from_json(small("table_sa1"));
  c.output_dir = "/proc/vbsq_cannot_write_here";
  std::ostringstream out, err;
  EXPECT_EQ(run_to_directory(c, out, err), 2);
  EXPECT_NE(err.str().find("output_dir"), std::string::npos);
}

TEST(Verify, FastPasses) {
  auto r = run_verify({true, false});
  std::ostringstream s;
  EXPECT_EQ(report_verify(r, s), 0) << s.str();
}

TEST(Verify, MutationFailsByName) {
  auto r = run_verify({true, true});
  std::ostringstream s;
  EXPECT_EQ(report_verify(r, s), 1);
  EXPECT_NE(s.str().find("FAIL overlap.ground_N3_L5"), std::string::npos);
  for (const auto& c : r)
    if (c.name.rfind("overlap.", 0) != 0) EXPECT_TRUE(c.pass) << c.name;
}
