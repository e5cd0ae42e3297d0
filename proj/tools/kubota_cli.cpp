#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kubota/cli.hpp"

namespace {

struct Flags {
  std::string body;
  std::uint64_t seed = 0;
  std::int64_t samples = 100000;
  int subspaces = 2000;
  std::string k;
  std::string p;
  std::string q;
  std::string eps;
  std::string t;
  std::string n;
  int tail_k = 4;
  std::string out;
  std::string format = "csv";
  std::string suite = "core";
  double ceiling = 10.0;
  double kappa = 1.0;
  double tol = 1e-3;
  std::int64_t width_directions = 1000;
  std::string plot;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--body", f.body, "Body JSON file");
  sub->add_option("--seed", f.seed, "Root seed")->capture_default_str();
  sub->add_option("--samples", f.samples, "Gaussian samples N")->capture_default_str();
  sub->add_option("--subspaces", f.subspaces, "Haar subspaces M")->capture_default_str();
  sub->add_option("--k", f.k, "Dimensions, e.g. 1..6 or 2,4");
  sub->add_option("--p", f.p, "Moment orders, comma separated");
  sub->add_option("--q", f.q, "Orders q, comma separated");
  sub->add_option("--eps", f.eps, "Tail thresholds epsilon");
  sub->add_option("--t", f.t, "Mean-width thresholds t");
  sub->add_option("--n", f.n, "Ambient dimensions for the zonoid experiment");
  sub->add_option("--tail-k", f.tail_k, "Projection dimension for tail checks")->capture_default_str();
  sub->add_option("--out", f.out, "Output path (stdout if omitted)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--suite", f.suite, "core, concentration, reverse_holder, moments, ordering, all")
      ->capture_default_str();
  sub->add_option("--ceiling", f.ceiling, "Acceptance ceiling for fitted constants")->capture_default_str();
  sub->add_option("--kappa", f.kappa, "Range constant in k <= kappa/beta")->capture_default_str();
  sub->add_option("--tol", f.tol, "Sandwich relative tolerance")->capture_default_str();
  sub->add_option("--width-directions", f.width_directions, "Directions per projected mean width")
      ->capture_default_str();
  sub->add_option("--plot", f.plot, "Also write long-format plot data here");
}

kubota::RunConfig to_config(const std::string& experiment, const Flags& f) {
  kubota::RunConfig c;
  c.experiment = experiment;
  c.body_file = f.body;
  c.seed = f.seed;
  c.samples = f.samples;
  c.subspaces = f.subspaces;
  if (!f.k.empty()) c.k_list = kubota::parse_int_list(f.k);
  if (!f.p.empty()) c.p_list = kubota::parse_double_list(f.p);
  if (!f.q.empty()) c.q_list = kubota::parse_double_list(f.q);
  if (!f.eps.empty()) c.eps_list = kubota::parse_double_list(f.eps);
  if (!f.t.empty()) c.t_list = kubota::parse_double_list(f.t);
  if (!f.n.empty()) c.n_list = kubota::parse_int_list(f.n);
  c.tail_k = f.tail_k;
  c.width_directions = f.width_directions;
  c.out = f.out;
  c.format = f.format;
  c.suite = f.suite;
  c.ceiling = f.ceiling;
  c.kappa = f.kappa;
  c.tol = f.tol;
  c.plot = f.plot;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intrinsic-volume profiles of symmetric convex bodies"};
  app.require_subcommand(1);
  Flags flags;
  std::string config_path;
  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"params", "Mean width, k_*, beta_*, d_*, radii of a body"},
      {"projvol", "Volumes of projections onto random k-subspaces"},
      {"profile", "W_[k] and W_[k,p] profile over a k list"},
      {"verify", "Run a named suite of inequality checks"},
      {"tails", "Tail frequencies of vrad of random projections"},
      {"zonoid", "Basis L_q-zonoid experiments"}};
  for (const auto& [name, help] : experiments) add_common(app.add_subcommand(name, help), flags);
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config or manifest JSON");
  run_cmd->add_option("--config", config_path, "RunConfig JSON or manifest")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kubota::kExitValidation;
  }

  try {
    if (run_cmd->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw kubota::ValidationError("cannot read config '" + config_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      kubota::json j;
      try {
        j = kubota::json::parse(ss.str());
      } catch (const kubota::json::parse_error& e) {
        throw kubota::ValidationError(config_path + ": malformed JSON at " +
                                      kubota::detail::line_col(ss.str(), e.byte == 0 ? 0 : e.byte - 1));
      }
      if (j.is_object() && j.contains("config")) j = j.at("config");
      return kubota::run(kubota::config_from_json(j));
    }
    for (const auto& [name, help] : experiments) {
      if (app.got_subcommand(name)) return kubota::run(to_config(name, flags));
    }
  } catch (const kubota::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kubota::kExitValidation;
  }
  return kubota::kExitValidation;
}
