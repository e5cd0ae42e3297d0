// Acceptance gate: one PASS/FAIL line per criterion. Optional arguments pick
// a subset of criterion numbers.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kubota/cli.hpp"
#include "oracles.hpp"

using namespace kubota;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kubota_acceptance";
  fs::create_directories(dir);
  return dir / name;
}

std::string example(const std::string& name) { return std::string(KUBOTA_SOURCE_DIR) + "/examples/bodies/" + name; }

std::string constants(const CheckResult& r) {
  std::string s;
  for (const auto& [k, v] : r.fitted_constants) s += fmt(" %s=%.4g", k.c_str(), v);
  return s;
}

Outcome zonotope_vs_hull() {
  SeedStream s = derive_stream(1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + static_cast<int>(s.next_u64() % 3);
    const int n = k + 1 + static_cast<int>(s.next_u64() % static_cast<std::uint64_t>(8 - k));
    const int m = n + static_cast<int>(s.next_u64() % static_cast<std::uint64_t>(11 - n));
    Eigen::MatrixXd g(n, m);
    for (int j = 0; j < m; ++j) g.col(j) = sample_gaussian(s, n);
    const Subspace E = sample_haar_subspace(s, n, k);
    const ProjectedBody pb = project_body(Body::zonotope(g), E);
    const auto& gk = std::get<ZonotopeK>(pb.rep).generators;
    const double z = zonotope_volume({gk}).value;
    const double h = hull_volume({oracle::zonotope_sign_sums(gk)}).value;
    worst = std::max(worst, std::abs(z - h) / h);
  }
  return {worst <= 1e-9, fmt("max relative error %.3g", worst)};
}

Outcome ball_identities() {
  const int n = 32;
  const Body ball = Body::lp_ball(n, 2.0);
  ProfileOptions o;
  o.subspaces = 1000;
  const QuermassProfile p = quermass_profile(ball, {1, 2, 3, 4, 5, 6}, o, derive_stream(2));
  double dev = 0.0;
  for (const auto& e : p.entries) dev = std::max(dev, e.ok() ? std::abs(e.W.value - 1.0) : kInf);
  const Estimate b = beta_star(ball, 100000, derive_stream(3));
  const double truth = oracle::chi_beta(n);
  const bool beta_ok = std::abs(b.value - truth) <= 3.0 * b.std_error;
  const double ks = k_star(ball, 100000, derive_stream(4)).estimate.value;
  return {dev <= 1e-9 && beta_ok && ks == n,
          fmt("max |W-1| %.3g; beta %.6g vs oracle %.6g (se %.2g); k_star %g", dev, b.value, truth, b.std_error, ks)};
}

Outcome sandwich_correctness() {
  const double tol = 1e-3;
  SandwichOptions so;
  so.tol = tol;
  const double a24 = oracle::lp_ball_area(4.0);
  const VolumeResult v24 = sandwich_volume(full_projection(Body::lp_ball(2, 4.0), true), so);
  const double e24 = std::abs(v24.value - a24) / a24;
  const double a33 = oracle::lp_ball_volume3(3.0);
  const VolumeResult v33 = sandwich_volume(full_projection(Body::lp_ball(3, 3.0), true), so);
  const double e33 = std::abs(v33.value - a33) / a33;
  SeedStream s = derive_stream(5);
  double ecube = 0.0;
  for (int k : {2, 3}) {
    for (int t = 0; t < 3; ++t) {
      const Subspace E = sample_haar_subspace(s, 6, k);
      const double exact = projection_volume(project_body(Body::cube(6), E)).value;
      const VolumeResult v = sandwich_volume(project_body(Body::cube(6), E, true), so);
      ecube = std::max(ecube, std::abs(v.value - exact) / exact);
    }
  }
  return {e24 <= tol && e33 <= tol && ecube <= tol,
          fmt("rel err LpBall(2,4) %.3g, LpBall(3,3) %.3g, cube oracle vs zonotope %.3g", e24, e33, ecube)};
}

Outcome alexandrov_cube16() {
  ProfileOptions o;
  o.subspaces = 2000;
  const QuermassProfile p = quermass_profile(Body::cube(16), {1, 2, 3, 4, 5, 6}, o, derive_stream(0));
  const CheckResult r = check_alexandrov(p);
  return {r.pass && p.complete(), fmt("margin %.4g", r.margin)};
}

Outcome plateau_cross64() {
  const Body b = Body::lp_ball(64, 1.0);
  ProfileOptions o;
  o.subspaces = 2000;
  const QuermassProfile p = quermass_profile(b, {1, 2, 3, 4, 5, 6}, o, derive_stream(6));
  const Estimate beta = beta_star(b, 100000, derive_stream(7));
  const CheckResult r = check_main1_plateau(p, beta);
  const double d6 = p.at(1)->W.value / p.at(6)->W.value - 1.0;
  return {r.pass && p.complete(), fmt("beta_* %.4g;%s; deficit at k=6 %.4g", beta.value, constants(r).c_str(), d6)};
}

Outcome tails_cube64() {
  const TailReport rep = tail_estimates(Body::cube(64), 4, {0.05, 0.1, 0.2}, 4000, derive_stream(8));
  bool ok = true;
  std::string d;
  for (const auto& c : check_tails(rep)) {
    ok = ok && c.pass;
    d += fmt("%s %s (margin %.3g); ", c.check.c_str(), c.status.c_str(), c.margin);
  }
  for (const auto& rec : rep.records) {
    d += fmt("%s eps=%g freq=%.4g; ", to_string(rec.direction).c_str(), rec.epsilon,
             rec.frequency);
  }
  return {ok, d};
}

Outcome mean_width_cube64() {
  const CheckResult r = check_mean_width_concentration(Body::cube(64), 4, {0.05, 0.1, 0.2}, 4000, 100000,
                                                       derive_stream(9));
  std::string d = constants(r);
  for (const auto& [k, v] : r.values) d += fmt(" %s=%.4g", k.c_str(), v);
  return {r.pass, d};
}

Outcome reverse_holder_cube64() {
  ReverseHolderOptions o;
  const auto rs = check_reverse_holder(Body::cube(64), {1, 2, 4, 8, 16, 32}, derive_stream(10), o);
  bool ok = rs.size() == 6;
  std::string d;
  for (const auto& r : rs) {
    // skipped entries are reported, not counted as passes
    if (r.status != "skipped") ok = ok && r.pass;
    d += fmt("%s %s%s; ", r.check.c_str(), r.status.c_str(), constants(r).c_str());
  }
  return {ok, d};
}

Outcome zonoid_scaling() {
  const CheckResult r = check_zonoid_beta_scaling(2.0, {32, 64, 128}, 100000, derive_stream(11));
  std::string d = constants(r);
  for (const auto& [k, v] : r.values) {
    if (k.rfind("scaled_", 0) == 0) d += fmt(" %s=%.4g", k.c_str(), v);
  }
  return {r.pass, d};
}

Outcome k1_degeneracy() {
  bool ok = true;
  std::string d;
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(std::string(KUBOTA_SOURCE_DIR) + "/examples/bodies")) {
    if (f.path().extension() == ".json") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t i = 0;
  for (const auto& f : files) {
    const Body b = load_body(f.string());
    const CheckResult r = check_k1_degeneracy(b, 2000, 100000, derive_stream(12).child(i++));
    ok = ok && r.pass;
    d += fmt("%s %s; ", f.stem().string().c_str(), r.status.c_str());
  }
  return {ok && !files.empty(), d};
}

Outcome moment_machinery() {
  const std::int64_t N = 10000000;
  std::vector<double> xs(static_cast<std::size_t>(N));
  SeedStream s = derive_stream(13);
  s.fill_gaussian(xs);
  for (auto& x : xs) x = std::abs(x);
  const MedianDeviation md = median_deviation(xs);
  const double mean = oracle::half_normal_moment(1.0);
  const double med = oracle::half_normal_median();
  const double sd = std::sqrt(oracle::half_normal_moment(2.0) - mean * mean);
  const bool values = std::abs(md.mean - mean) <= 1e-3 && std::abs(md.median - med) <= 1e-3 &&
                      std::abs(md.sd - sd) <= 1e-3;
  const bool ineq = std::abs(md.mean - md.median) <= md.sd;

  const Body cube = Body::cube(64);
  const SupportSample ss = sample_support(cube, 100000, derive_stream(14));
  const double ks = k_star(ss, circumradius(cube)).estimate.value;
  const double m = detail::sample_mean(ss.gaussian).value;
  std::vector<double> xi(ss.gaussian.begin(), ss.gaussian.end());
  for (auto& x : xi) x /= m;
  bool moments = true;
  std::string d = fmt("mean %.5f/%.5f median %.5f/%.5f sd %.5f/%.5f;", md.mean, mean, md.median, med, md.sd, sd);
  for (const auto& r : moment_profile_check(xi, ks, TailKind::subgaussian)) {
    moments = moments && r.pass;
    d += fmt(" %s %s%s;", r.check.c_str(), r.status.c_str(), constants(r).c_str());
  }
  return {values && ineq && moments, d};
}

Outcome determinism() {
  std::vector<RunConfig> cs;
  {
    RunConfig c;
    c.experiment = "profile";
    c.body_file = example("cube16.json");
    c.k_list = {1, 2, 3, 4, 5, 6};
    c.subspaces = 2000;
    c.seed = 0;
    c.p_list = {-1.0, 2.0};
    cs.push_back(c);
  }
  {
    RunConfig c;
    c.experiment = "verify";
    c.body_file = example("ball64.json");
    c.suite = "all";
    c.samples = 20000;
    c.subspaces = 100;
    c.seed = 7;
    cs.push_back(c);
  }
  {
    RunConfig c;
    c.experiment = "tails";
    c.body_file = example("cube64.json");
    c.subspaces = 1000;
    c.seed = 8;
    cs.push_back(c);
  }
  {
    RunConfig c;
    c.experiment = "zonoid";
    c.q_list = {2.0};
    c.seed = 11;
    c.format = "json";
    cs.push_back(c);
  }
  bool ok = true;
  std::string d;
  int idx = 0;
  for (RunConfig c : cs) {
    std::string outs[2];
    std::string plots[2];
    std::ostringstream err;
    for (int rep = 0; rep < 2; ++rep) {
      c.out = scratch(fmt("det_%d_%d.out", idx, rep)).string();
      c.plot = scratch(fmt("det_%d_%d.plot.csv", idx, rep)).string();
      const int code = run(c, err);
      if (code != kExitOk && code != kExitFailedChecks) ok = false;
      outs[rep] = slurp(c.out);
      plots[rep] = slurp(c.plot);
    }
    const bool same = !outs[0].empty() && outs[0] == outs[1] && plots[0] == plots[1];
    ok = ok && same;
    d += fmt("%s %s; ", c.experiment.c_str(), same ? "identical" : "DIFFERENT");
    ++idx;
  }
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "zonotope kernel vs hull of vertices", 10, zonotope_vs_hull},
      {2, "ball identities", 30, ball_identities},
      {3, "sandwich correctness", 0, sandwich_correctness},
      {4, "alexandrov monotonicity Cube(16)", 120, alexandrov_cube16},
      {5, "plateau constant LpBall(64,1)", 300, plateau_cross64},
      {6, "projection volume tails Cube(64) k=4", 0, tails_cube64},
      {7, "mean width concentration Cube(64) k=4", 0, mean_width_cube64},
      {8, "reverse Holder suite Cube(64)", 0, reverse_holder_cube64},
      {9, "basis zonoid beta scaling q=2", 60, zonoid_scaling},
      {10, "k=1 degeneracy on example bodies", 0, k1_degeneracy},
      {11, "moment machinery self-test", 0, moment_machinery},
      {12, "determinism of repeated runs", 0, determinism},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit == 0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s: %s (%.1f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                in_time ? "" : ", over time limit", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
