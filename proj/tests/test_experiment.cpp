#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ranges>
#include <sstream>

#include "wmr/experiment.hpp"

namespace wmr {
namespace {

namespace fs = std::filesystem;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string run_to_string(const ExperimentConfig& cfg, ExperimentSummary* sum = nullptr) {
  std::ostringstream out;
  const auto s = run_experiment(cfg, out);
  if (sum) *sum = s;
  return out.str();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("wmr_test_" + std::to_string(::getpid()) + "_" + name); }

TEST(ExperimentNames, RoundTrip) {
  for (const auto& [e, name] : kExperimentNames) EXPECT_EQ(parse_experiment(name), e);
  EXPECT_THROW(parse_experiment("fig9"), UsageError);
}

TEST(PGrid, Points) {
  const auto pts = PGrid{}.points();
  ASSERT_EQ(pts.size(), 201u);
  EXPECT_EQ(pts.front(), 0.0);
  EXPECT_EQ(pts.back(), 1.0);
  EXPECT_EQ((PGrid{0.2, 0.2, 0.1}.points()), std::vector<double>{0.2});
  EXPECT_EQ((PGrid{0.0, 1.0, 0.3}.points().size()), 4u);
}

TEST(Validate, RejectsBadConfigs) {
  auto cfg = default_config(Experiment::mw_vs_p);
  cfg.n_list = {5};
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::ln_vs_p);
  cfg.p_grid.step = 0.0;
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::ln_vs_p);
  cfg.n_list.clear();
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::ln_vs_p);
  cfg.m = 4;
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::tel_fidelity_vs_p);
  cfg.n_list = {2};
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::ln_vs_p);
  cfg.s_list = {1.0};
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = default_config(Experiment::critical_ln);
  cfg.p_grid = {0.5, 0.5, 0.1};
  EXPECT_THROW(validate(cfg), UsageError);
  EXPECT_NO_THROW(validate(default_config(Experiment::critical_mw)));
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Csv, QuotesExtraWithCommas) {
  CsvRow row;
  row.experiment = "x";
  row.extra = "a,\"b\"";
  EXPECT_EQ(format_row(row), "x,0,,,,,,,\"a,\"\"b\"\"\"");
}

TEST(Csv, EmptyRowSetIsHeaderOnly) {
  const auto path = temp_path("empty.csv");
  emit_csv(std::vector<CsvRow>{}, path.string());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), std::string(kCsvHeader) + "\n");
  fs::remove(path);
}

TEST(Csv, UnwritablePathNamesThePath) {
  try {
    emit_csv(std::vector<CsvRow>{}, "/nonexistent_dir_wmr/out.csv");
    FAIL();
  } catch (const std::runtime_error& ex) {
    EXPECT_NE(std::string(ex.what()).find("/nonexistent_dir_wmr/out.csv"), std::string::npos);
  }
}

// Rows are produced lazily by the range; nothing is collected first.
TEST(Csv, TenThousandRowsFromLazyRange) {
  std::size_t produced = 0;
  auto rows = std::views::iota(0, 10000) | std::views::transform([&](int i) {
                ++produced;
                CsvRow r;
                r.experiment = "stream";
                r.n = i;
                r.value = i * 0.5;
                return r;
              });
  const auto path = temp_path("stream.csv");
  emit_csv(rows, path.string());
  EXPECT_EQ(produced, 10000u);
  std::ifstream f(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  EXPECT_EQ(lines, 10001u);
  fs::remove(path);
}

// Counts how often the runner hands data to the sink.
class FlushCounter : public std::stringbuf {
public:
  int syncs = 0;

protected:
  int sync() override {
    ++syncs;
    return std::stringbuf::sync();
  }
};

TEST(RunExperiment, StreamsLargeSweepsInChunks) {
  auto cfg = default_config(Experiment::ln_vs_p);
  cfg.s_list = {0.0};
  cfg.p_grid = {0.0, 1.0, 1e-4};
  FlushCounter buf;
  std::ostream out(&buf);
  const auto sum = run_experiment(cfg, out);
  EXPECT_EQ(sum.rows, 10001u);
  EXPECT_GE(buf.syncs, 3);
  EXPECT_EQ(parse_csv(buf.str()).size(), 10002u);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  auto cfg = default_config(Experiment::mw_vs_p);
  cfg.n_list = {6, 4};
  cfg.s_list = {0.5, 0.0};
  cfg.p_grid = {0.0, 1.0, 0.05};
  ::setenv(kThreadsEnv, "1", 1);
  const std::string one = run_to_string(cfg);
  ::setenv(kThreadsEnv, "7", 1);
  const std::string seven = run_to_string(cfg);
  ::unsetenv(kThreadsEnv);
  EXPECT_EQ(one, seven);
  EXPECT_EQ(run_to_string(cfg), one);

  // ordering is (n, s, p) ascending regardless of input order
  const auto rows = parse_csv(one);
  ASSERT_EQ(rows.size(), 1 + 2 * 2 * 21u);
  EXPECT_EQ(rows[1][1], "4");
  EXPECT_EQ(rows[1][3], "0");
  EXPECT_EQ(rows.back()[1], "6");
  EXPECT_EQ(rows.back()[3], "0.5");
  EXPECT_EQ(rows.back()[4], "1");
}

TEST(RunExperiment, OutputFileAndMetadataAreReproducible) {
  auto cfg = default_config(Experiment::tel_fidelity_vs_p);
  cfg.p_grid.step = 0.1;
  cfg.output_path = temp_path("tel.csv").string();
  cfg.mark_explicit("p_grid");
  run_experiment_to_output(cfg);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string first = slurp(cfg.output_path);
  const std::string meta = slurp(cfg.output_path + ".meta.json");
  run_experiment_to_output(cfg);
  EXPECT_EQ(slurp(cfg.output_path), first);
  EXPECT_EQ(slurp(cfg.output_path + ".meta.json"), meta);

  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j["experiment"], "tel_fidelity_vs_p");
  const auto defaulted = j["defaulted_fields"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(defaulted.begin(), defaulted.end(), "s_list"), defaulted.end());
  EXPECT_EQ(std::find(defaulted.begin(), defaulted.end(), "p_grid"), defaulted.end());
  EXPECT_EQ(j["rows"], 4 * 11);
  fs::remove(cfg.output_path);
  fs::remove(cfg.output_path + ".meta.json");
}

TEST(ConfigJson, OverridesDefaults) {
  auto cfg = default_config(Experiment::ln_vs_p);
  apply_config_json(cfg, nlohmann::json::parse(R"({"n": [6, 8], "s": 0.2, "p_step": 0.1, "m": 3, "out": "x.csv"})"));
  EXPECT_EQ(cfg.n_list, (std::vector<int>{6, 8}));
  EXPECT_EQ(cfg.s_list, (std::vector<double>{0.2}));
  EXPECT_EQ(cfg.p_grid.step, 0.1);
  EXPECT_EQ(cfg.m, 3);
  EXPECT_EQ(cfg.output_path, "x.csv");
  EXPECT_EQ(cfg.defaulted.count("n_list"), 0u);
  EXPECT_EQ(cfg.defaulted.count("theta"), 1u);
  EXPECT_THROW(apply_config_json(cfg, nlohmann::json::parse(R"({"n": "four"})")), UsageError);
}

// A failing grid point is flagged and the run continues.
TEST(RunExperiment, NumericalFailureIsFlagged) {
  auto cfg = default_config(Experiment::mw_vs_p);
  const CsvRow bad = detail::evaluate_task(cfg, {5, 0.0, 0.1});
  EXPECT_FALSE(bad.value.has_value());
  EXPECT_NE(bad.extra.find(";error="), std::string::npos);
  const CsvRow good = detail::evaluate_task(cfg, {4, 0.0, 0.1});
  EXPECT_TRUE(good.value.has_value());
}

// LN curves decrease with p, protected curves dominate the
// unprotected one, and the death threshold is crossed.
TEST(RunExperiment, LnCurvesShape) {
  auto cfg = default_config(Experiment::ln_vs_p);
  cfg.theta = 2 * std::numbers::pi / 3;
  cfg.p_grid.step = 0.02;
  const auto rows = parse_csv(run_to_string(cfg));
  const std::size_t per_s = 51;
  ASSERT_EQ(rows.size(), 1 + 4 * per_s);
  for (std::size_t k = 0; k < 4; ++k) {
    double prev = INFINITY;
    bool died = false;
    for (std::size_t i = 0; i < per_s; ++i) {
      const auto& row = rows[1 + k * per_s + i];
      const double v = std::stod(row[6]);
      EXPECT_LE(v, prev + 1e-12) << row[3] << ' ' << row[4];
      prev = v;
      died = died || v <= kDeathThreshold;
      if (k > 0) EXPECT_GE(v, std::stod(rows[1 + i][6]) - 1e-9) << "s=" << row[3] << " p=" << row[4];
    }
    EXPECT_TRUE(died);
  }
}

TEST(RunExperiment, CriticalMwApproachesQuarter) {
  auto cfg = default_config(Experiment::critical_mw);
  cfg.s_list = {0.0};
  const auto rows = parse_csv(run_to_string(cfg));
  ASSERT_EQ(rows.size(), 26u);
  double prev = 1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double closed = std::stod(rows[i][6]);
    const double numeric = std::stod(rows[i][4]);
    EXPECT_GT(closed, 0.25);
    EXPECT_LT(closed, prev);
    EXPECT_LE(numeric, closed + 1e-5);
    prev = closed;
  }
  EXPECT_LT(prev, 0.26);
}

TEST(RunExperiment, TransmissivityDecreasesInSAndN) {
  auto cfg = default_config(Experiment::transmissivity_vs_s);
  const auto rows = parse_csv(run_to_string(cfg));
  const std::size_t per_n = cfg.s_list.size();
  ASSERT_EQ(rows.size(), 1 + 4 * per_n);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 1; i < per_n; ++i) {
      const double t = std::stod(rows[1 + k * per_n + i][7]);
      EXPECT_LE(t, std::stod(rows[k * per_n + i][7]) + 1e-12) << "n=" << rows[1 + k * per_n + i][1] << " s=" << rows[1 + k * per_n + i][3];
      if (k > 0) EXPECT_LE(t, std::stod(rows[1 + (k - 1) * per_n + i][7]) + 1e-12);
    }
}

TEST(RunExperiment, OracleSuiteQuickPasses) {
  auto cfg = default_config(Experiment::oracle_suite);
  cfg.quick = true;
  ExperimentSummary sum;
  const auto rows = parse_csv(run_to_string(cfg, &sum));
  EXPECT_TRUE(sum.oracle_passed);
  EXPECT_GT(rows.size(), 10u);
  EXPECT_LE(sum.max_oracle_deviation, 1e-8);
}

} // namespace
} // namespace wmr
