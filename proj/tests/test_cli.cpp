#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kubota/cli.hpp"

using namespace kubota;
namespace fs = std::filesystem;

namespace {

std::string example(const std::string& name) { return std::string(KUBOTA_SOURCE_DIR) + "/examples/bodies/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kubota_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
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

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST(Config, RoundTripThroughManifest) {
  RunConfig c;
  c.experiment = "profile";
  c.body_file = "x.json";
  c.seed = 99;
  c.k_list = {1, 2, 3};
  c.p_list = {-1.0, 2.0};
  c.kappa = 0.5;
  const json m = manifest_json(c, 1.25);
  EXPECT_EQ(m["config_hash"], hex64(config_hash(c)));
  EXPECT_EQ(m["seed"], 99);
  const RunConfig back = config_from_json(json::parse(m.dump())["config"]);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(config_hash(back), config_hash(c));
  RunConfig d = c;
  d.seed = 100;
  EXPECT_NE(config_hash(d), config_hash(c));
}

TEST(Config, UnknownFieldRejected) {
  json j = config_to_json(RunConfig{});
  j["sampels"] = 5;
  EXPECT_THROW(config_from_json(j), ValidationError);
}

TEST(Lists, Parse) {
  EXPECT_EQ(parse_int_list("1..6"), (std::vector<int>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(parse_int_list("1,3,5..6"), (std::vector<int>{1, 3, 5, 6}));
  EXPECT_EQ(parse_double_list("0.05,0.1,-2"), (std::vector<double>{0.05, 0.1, -2.0}));
  EXPECT_THROW(parse_int_list("1,x"), ValidationError);
  EXPECT_THROW(parse_int_list("4..2"), ValidationError);
}

TEST(Run, MalformedBodyExitsWithLine) {
  const fs::path p = scratch("broken.json");
  {
    std::ofstream f(p);
    f << "{\n  \"type\": \"cube\",\n  \"n\": 4,\n  \"halfwidth\": \n}\n";
  }
  RunConfig c;
  c.body_file = p.string();
  std::ostringstream err;
  EXPECT_EQ(run(c, err), kExitValidation);
  EXPECT_NE(err.str().find("line 5"), std::string::npos) << err.str();
}

TEST(Run, BadFieldNamesField) {
  RunConfig c;
  c.body_inline = json{{"type", "zonotope"}, {"generators", {{1.0, 0.0}, {0.0}}}};
  std::ostringstream err;
  EXPECT_EQ(run(c, err), kExitValidation);
  EXPECT_NE(err.str().find("generators[1]"), std::string::npos) << err.str();
}

TEST(Run, ProfileCube16) {
  RunConfig c;
  c.experiment = "profile";
  c.body_file = example("cube16.json");
  c.k_list = parse_int_list("1..6");
  c.subspaces = 200;
  c.seed = 3;
  c.out = scratch("cube16_profile.csv").string();
  c.plot = scratch("cube16_profile.plot.csv").string();
  std::ostringstream err;
  ASSERT_EQ(run(c, err), kExitOk) << err.str();
  const auto rows = csv_rows(slurp(c.out));
  ASSERT_EQ(rows.size(), 7u);
  const auto& h = rows.front();
  const std::size_t W = column(h, "W"), lo = column(h, "W_ci_lo"), hi = column(h, "W_ci_hi");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LE(std::stod(rows[i][lo]), std::stod(rows[i - 1][hi])) << "k=" << i;
    EXPECT_GT(std::stod(rows[i][W]), 0.0);
  }
  EXPECT_TRUE(fs::exists(c.out + ".manifest.json"));
  EXPECT_EQ(csv_rows(slurp(c.plot)).size(), 7u);
}

TEST(Run, VerifyIsByteIdentical) {
  RunConfig c;
  c.experiment = "verify";
  c.body_file = example("ball64.json");
  c.suite = "core";
  c.seed = 7;
  c.samples = 20000;
  c.subspaces = 100;
  c.out = scratch("ball_a.csv").string();
  std::ostringstream err;
  ASSERT_EQ(run(c, err), kExitOk) << err.str();
  c.out = scratch("ball_b.csv").string();
  ASSERT_EQ(run(c, err), kExitOk) << err.str();
  EXPECT_EQ(slurp(scratch("ball_a.csv")), slurp(scratch("ball_b.csv")));
  EXPECT_FALSE(slurp(scratch("ball_a.csv")).empty());
}

TEST(Run, BudgetExit) {
  RunConfig c;
  c.experiment = "profile";
  c.body_inline = json{{"type", "lp_ball"}, {"n", 10}, {"p", 1}};
  c.k_list = {2, 9};
  c.subspaces = 50;
  c.out = scratch("budget.csv").string();
  std::ostringstream err;
  EXPECT_EQ(run(c, err), kExitBudget);
  EXPECT_NE(err.str().find("k=9"), std::string::npos) << err.str();
  const auto rows = csv_rows(slurp(c.out));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].back(), "ok");
  EXPECT_EQ(rows[2].back(), "budget_error");
}

TEST(Run, FailedChecksExit) {
  RunConfig c;
  c.experiment = "verify";
  c.body_file = example("cube16.json");
  c.samples = 20000;
  c.subspaces = 100;
  c.k_list = {1, 2, 3};
  c.ceiling = 1e-9;
  c.out = scratch("fail.csv").string();
  std::ostringstream err;
  EXPECT_EQ(run(c, err), kExitFailedChecks) << err.str();
  EXPECT_NE(slurp(c.out).find("fail"), std::string::npos);
}

TEST(Run, UnknownExperiment) {
  RunConfig c;
  c.experiment = "nope";
  std::ostringstream err;
  EXPECT_EQ(run(c, err), kExitValidation);
}

TEST(PlotData, EmptyReportIsHeaderOnly) {
  EXPECT_EQ(emit_plotdata({}), "series,x,y,y_lo,y_hi\n");
}

TEST(PlotData, TailsRowsPerDirection) {
  const TailReport r = tail_estimates(Body::cube(8), 2, {0.05, 0.1, 0.2}, 100, derive_stream(5));
  const auto rows = plot_rows(r);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const PlotRow& p) { return p.series == "tail_upper"; }), 3);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const PlotRow& p) { return p.series == "tail_lower"; }), 3);
}

TEST(PlotData, ProfileSeriesPerMoment) {
  ProfileOptions o;
  o.subspaces = 50;
  o.p_list = {-1.0, 2.0};
  const QuermassProfile p = quermass_profile(Body::cube(6), {1, 2, 3}, o, derive_stream(6));
  const auto rows = plot_rows(p);
  std::set<std::string> series;
  for (const auto& r : rows) series.insert(r.series);
  EXPECT_EQ(series, (std::set<std::string>{"W", "W_p=-1", "W_p=2"}));
  EXPECT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_LE(r.y_lo, r.y);
    EXPECT_LE(r.y, r.y_hi);
  }
}

TEST(DefaultKList, Caps) {
  EXPECT_EQ(default_k_list(Body::cube(16)), (std::vector<int>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(default_k_list(Body::lp_ball(4, 2.0)), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(default_k_list(Body::lp_ball(8, 3.0)), (std::vector<int>{1, 2}));
}
