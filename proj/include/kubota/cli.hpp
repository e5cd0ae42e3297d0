#pragma once

// Batch runner: RunConfig in, CSV/JSON artifacts and a manifest out.
// Exit codes: 0 ok, 2 validation error, 3 budget error, 4 failed checks.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kubota/bodies.hpp"
#include "kubota/body_io.hpp"
#include "kubota/errors.hpp"
#include "kubota/functionals.hpp"
#include "kubota/linrand.hpp"
#include "kubota/projvol.hpp"
#include "kubota/quermass.hpp"

namespace kubota {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitBudget = 3, kExitFailedChecks = 4 };

struct RunConfig {
  std::string experiment = "params";
  std::string body_file;
  std::optional<json> body_inline;
  std::uint64_t seed = 0;
  std::int64_t samples = 100000;
  int subspaces = 2000;
  /// Empty means the body-dependent default range.
  std::vector<int> k_list;
  std::vector<double> p_list;
  std::vector<double> q_list{1, 2, 4, 8, 16, 32};
  std::vector<double> eps_list{0.05, 0.1, 0.2};
  std::vector<double> t_list{0.05, 0.1, 0.2};
  std::vector<int> n_list{32, 64, 128};
  int tail_k = 4;
  std::int64_t width_directions = 1000;
  double tol = 1e-3;
  double ceiling = 10.0;
  double kappa = 1.0;
  std::string suite = "core";
  std::string out;
  std::string format = "csv";
  std::string plot;

  bool operator==(const RunConfig&) const = default;
};

inline json config_to_json(const RunConfig& c) {
  json j = {{"experiment", c.experiment},
            {"body_file", c.body_file},
            {"seed", c.seed},
            {"samples", c.samples},
            {"subspaces", c.subspaces},
            {"k_list", c.k_list},
            {"p_list", c.p_list},
            {"q_list", c.q_list},
            {"eps_list", c.eps_list},
            {"t_list", c.t_list},
            {"n_list", c.n_list},
            {"tail_k", c.tail_k},
            {"width_directions", c.width_directions},
            {"tol", c.tol},
            {"ceiling", c.ceiling},
            {"kappa", c.kappa},
            {"suite", c.suite},
            {"out", c.out},
            {"format", c.format},
            {"plot", c.plot}};
  j["body"] = c.body_inline ? *c.body_inline : json(nullptr);
  return j;
}

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  RunConfig c;
  const auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception&) {
      throw ValidationError(std::string("config field '") + key + "': wrong type");
    }
  };
  for (const auto& [key, _] : j.items()) {
    static const std::vector<std::string> known = {
        "experiment", "body_file", "body", "seed", "samples", "subspaces", "k_list", "p_list", "q_list",
        "eps_list", "t_list", "n_list", "tail_k", "width_directions", "tol", "ceiling", "kappa", "suite",
        "out", "format", "plot"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("config: unknown field '" + key + "'");
    }
  }
  get("experiment", c.experiment);
  get("body_file", c.body_file);
  get("seed", c.seed);
  get("samples", c.samples);
  get("subspaces", c.subspaces);
  get("k_list", c.k_list);
  get("p_list", c.p_list);
  get("q_list", c.q_list);
  get("eps_list", c.eps_list);
  get("t_list", c.t_list);
  get("n_list", c.n_list);
  get("tail_k", c.tail_k);
  get("width_directions", c.width_directions);
  get("tol", c.tol);
  get("ceiling", c.ceiling);
  get("kappa", c.kappa);
  get("suite", c.suite);
  get("out", c.out);
  get("format", c.format);
  get("plot", c.plot);
  if (j.contains("body") && !j.at("body").is_null()) c.body_inline = j.at("body");
  return c;
}

/// 64-bit FNV-1a of the canonical (key-sorted, compact) config JSON.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// ---------------------------------------------------------------------------
// List parsing: "1..6", "1,2,4", "3"

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  const auto to_int = [&](const std::string& t) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("cannot parse integer list '" + s + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int a = to_int(item.substr(0, dots));
    const int b = to_int(item.substr(dots + 2));
    if (b < a) throw ValidationError("empty range '" + item + "'");
    for (int k = a; k <= b; ++k) out.push_back(k);
  }
  if (out.empty()) throw ValidationError("empty list '" + s + "'");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(item == "inf" ? kInf : std::stod(item, &pos));
      if (item != "inf" && pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number list '" + s + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty list '" + s + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Writers. Every number is printed with 12 significant digits.

inline std::string fmt12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline json json12(double x) {
  if (!std::isfinite(x)) return fmt12(x);
  return std::strtod(fmt12(x).c_str(), nullptr);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvTable& operator<<(double x) { return cell(fmt12(x)); }
  CsvTable& operator<<(int x) { return cell(std::to_string(x)); }
  CsvTable& operator<<(std::int64_t x) { return cell(std::to_string(x)); }
  CsvTable& operator<<(const std::string& s) { return cell(s); }
  CsvTable& operator<<(const char* s) { return cell(s); }

  std::string str() const {
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }
  std::size_t size() const { return rows_.size(); }

 private:
  CsvTable& cell(std::string s) {
    rows_.back().push_back(std::move(s));
    return *this;
  }
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + quote(cells[i]);
    return line + "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline json estimate_json(const Estimate& e) {
  return {{"value", json12(e.value)},
          {"std_error", json12(e.std_error)},
          {"ci_lo", json12(e.ci_lo)},
          {"ci_hi", json12(e.ci_hi)},
          {"n_samples", e.n_samples}};
}

inline json named_json(const std::vector<std::pair<std::string, double>>& kv) {
  json o = json::object();
  for (const auto& [k, v] : kv) o[k] = json12(v);
  return o;
}

inline json check_json(const CheckResult& c) {
  json j = {{"check", c.check},
            {"anchor", c.anchor},
            {"fitted_constants", named_json(c.fitted_constants)},
            {"margin", json12(c.margin)},
            {"pass", c.pass},
            {"status", c.status},
            {"samples", c.samples}};
  if (!c.note.empty()) j["note"] = c.note;
  if (!c.values.empty()) j["values"] = named_json(c.values);
  return j;
}

inline json report_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  return {{"body", r.body}, {"checks", checks}, {"failed", r.any_failed()}};
}

inline CsvTable report_csv(const VerificationReport& r) {
  CsvTable t({"check", "anchor", "status", "pass", "margin", "samples", "fitted_constants", "note"});
  for (const auto& c : r.checks) {
    std::string fc;
    for (const auto& [k, v] : c.fitted_constants) fc += (fc.empty() ? "" : ";") + k + "=" + fmt12(v);
    t.row() << c.check << c.anchor << c.status << (c.pass ? "true" : "false") << c.margin << c.samples << fc
            << c.note;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Plot data in long format

struct PlotRow {
  std::string series;
  double x = 0.0;
  double y = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

inline std::string emit_plotdata(const std::vector<PlotRow>& rows) {
  CsvTable t({"series", "x", "y", "y_lo", "y_hi"});
  for (const auto& r : rows) t.row() << r.series << r.x << r.y << r.y_lo << r.y_hi;
  return t.str();
}

inline std::vector<PlotRow> plot_rows(const QuermassProfile& prof) {
  std::vector<PlotRow> out;
  for (const auto& e : prof.entries) {
    if (e.ok()) out.push_back({"W", double(e.k), e.W.value, e.W.ci_lo, e.W.ci_hi});
  }
  std::vector<double> ps;
  for (const auto& e : prof.entries) {
    for (const auto& [p, _] : e.Wp) {
      if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
    }
  }
  for (double p : ps) {
    for (const auto& e : prof.entries) {
      if (const Estimate* m = e.ok() ? e.moment(p) : nullptr) {
        out.push_back({"W_p=" + fmt12(p), double(e.k), m->value, m->ci_lo, m->ci_hi});
      }
    }
  }
  return out;
}

inline std::vector<PlotRow> plot_rows(const TailReport& rep) {
  std::vector<PlotRow> out;
  for (const auto& t : rep.records) {
    out.push_back({"tail_" + to_string(t.direction), t.epsilon, t.frequency, t.ci_lo, t.ci_hi});
  }
  return out;
}

/// The beta-scaling line from a zonoid_beta_scaling check, one point per n.
inline std::vector<PlotRow> plot_rows(const CheckResult& c) {
  std::vector<PlotRow> out;
  if (c.check != "zonoid_beta_scaling") return out;
  const auto find = [&](const std::string& key) {
    for (const auto& [k, v] : c.values) {
      if (k == key) return std::optional<double>(v);
    }
    return std::optional<double>();
  };
  for (const auto& [k, v] : c.values) {
    if (k.rfind("scaled_n", 0) != 0) continue;
    const std::string n = k.substr(8);
    const auto beta = find("beta_n" + n);
    const auto se = find("beta_n" + n + "_se");
    const double rel = beta && se && *beta > 0.0 ? kZ95 * *se / *beta : 0.0;
    out.push_back({"beta_scaling", std::stod(n), v, v * (1.0 - rel), v * (1.0 + rel)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

/// Exact zonotope subset counts above this are left out of default k ranges.
inline constexpr double kDeskSubsetBudget = 1e6;

/// k = 1..min(6, n-1), stopping where an exact path would exceed the desk
/// budget; sandwich-only bodies stop at k = 2.
inline std::vector<int> default_k_list(const Body& body) {
  const int n = body.dim();
  std::vector<int> ks;
  const int top = std::min(6, n - 1);
  const ProjectedBody probe = full_projection(body);
  for (int k = 1; k <= top; ++k) {
    if (const auto* z = std::get_if<ZonotopeK>(&probe.rep)) {
      if (detail::binomial(static_cast<int>(z->generators.cols()), k) > kDeskSubsetBudget) break;
    } else if (const auto* o = std::get_if<OracleK>(&probe.rep); o && !o->gram && k > 2) {
      break;
    }
    ks.push_back(k);
  }
  if (ks.empty()) ks.push_back(1);
  return ks;
}

struct RunOutput {
  std::string primary;
  std::vector<PlotRow> plot;
  bool checks_failed = false;
  std::optional<BudgetError> budget;
};

namespace detail {

inline std::string estimate_flag(bool exact) { return exact ? "exact" : "mc"; }

inline RunOutput run_params(const Body& body, const RunConfig& c, const SeedStream& root) {
  if (c.samples < 100) throw ValidationError("params: --samples must be >= 100");
  const SupportSample sample = sample_support(body, c.samples, root.child(0));
  const BodyParameters bp = body_parameters(body, c.samples, root.child(0));
  struct Row {
    std::string name;
    Estimate e;
    std::string flag;
  };
  std::vector<Row> rows = {
      {"w", bp.w, "mc"},
      {"R", Estimate::exact(bp.R.value), bp.R.exact ? "exact" : "approx"},
      {"r", Estimate::exact(bp.r.value), bp.r.exact ? "exact" : "approx"},
      {"beta_star", bp.beta_star, "mc"},
      {"k_star", bp.k_star, bp.k_star_exact_radius ? "exact_radius" : "approx_radius"},
      {"d_star", bp.d_star, bp.d_star_reliable ? "reliable" : "unreliable"},
      {"gaussian_median", bp.m_gauss, "mc"},
      {"gaussian_variance", bp.v_star, "mc"},
      {"gaussian_mean", bp.gaussian_mean, "mc"},
  };
  for (double p : c.p_list) rows.push_back({"w_p=" + fmt12(p), width_p(sample, p), "mc"});
  RunOutput out;
  if (c.format == "json") {
    json j = json::object();
    for (const auto& r : rows) {
      json e = estimate_json(r.e);
      e["exactness_flag"] = r.flag;
      j[r.name] = e;
    }
    out.primary = json({{"body", body.label.empty() ? body.kind() : body.label}, {"parameters", j}}).dump(2) + "\n";
  } else {
    CsvTable t({"quantity", "value", "std_error", "ci_lo", "ci_hi", "n_samples", "exactness_flag"});
    for (const auto& r : rows) {
      t.row() << r.name << r.e.value << r.e.std_error << r.e.ci_lo << r.e.ci_hi << r.e.n_samples << r.flag;
    }
    out.primary = t.str();
  }
  return out;
}

inline RunOutput run_projvol(const Body& body, const RunConfig& c, const SeedStream& root) {
  if (c.k_list.size() != 1) throw ValidationError("projvol: --k must name exactly one dimension");
  const int k = c.k_list.front();
  const int n = body.dim();
  if (k < 1 || k > n) throw ValidationError("projvol: k out of range 1..n");
  if (c.subspaces < 1) throw ValidationError("projvol: --subspaces must be >= 1");
  const int M = k == n ? 1 : c.subspaces;
  struct Row {
    VolumeResult v;
    double vrad = 0.0;
    double width = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(M));
  ProjectionVolumeOptions vopt;
  vopt.sandwich.tol = c.tol;
  const SeedStream width_stream = root.child({kWidthTag, static_cast<std::uint64_t>(k)});
  detail::parallel_for(rows.size(), [&](std::size_t j) {
    ProjectedBody pb = [&] {
      if (k == n) return full_projection(body);
      SeedStream s = root.child({kSubspaceTag, static_cast<std::uint64_t>(k), j});
      return project_body(body, sample_haar_subspace(s, n, k));
    }();
    rows[j].v = projection_volume(pb, vopt);
    rows[j].vrad = vrad(rows[j].v, k);
    rows[j].width = proj_mean_width(pb, c.width_directions, width_stream).value;
  });
  RunOutput out;
  if (c.format == "json") {
    json a = json::array();
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& r = rows[j];
      a.push_back({{"subspace_index", j},
                   {"method", to_string(r.v.method)},
                   {"volume", json12(r.v.value)},
                   {"vol_lower", json12(r.v.lower)},
                   {"vol_upper", json12(r.v.upper)},
                   {"vrad", json12(r.vrad)},
                   {"proj_mean_width", json12(r.width)}});
    }
    out.primary = json({{"k", k}, {"subspaces", a}}).dump(2) + "\n";
  } else {
    CsvTable t({"subspace_index", "method", "volume", "vol_lower", "vol_upper", "vrad", "proj_mean_width"});
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& r = rows[j];
      t.row() << static_cast<int>(j) << to_string(r.v.method) << r.v.value << r.v.lower << r.v.upper << r.vrad
              << r.width;
    }
    out.primary = t.str();
  }
  return out;
}

inline RunOutput run_profile(const Body& body, const RunConfig& c, const SeedStream& root) {
  ProfileOptions opt;
  opt.subspaces = c.subspaces;
  opt.p_list = c.p_list;
  opt.sandwich.tol = c.tol;
  if (opt.subspaces < 50) throw ValidationError("profile: --subspaces must be >= 50");
  const std::vector<int> ks = c.k_list.empty() ? default_k_list(body) : c.k_list;
  for (int k : ks) {
    if (k < 1 || k > body.dim()) throw ValidationError("profile: k out of range 1..n");
  }
  const QuermassProfile prof = quermass_profile(body, ks, opt, root);
  RunOutput out;
  out.plot = plot_rows(prof);
  for (const auto& e : prof.entries) {
    if (!e.ok() && !out.budget) out.budget = BudgetError(*e.error, e.k, e.error_method);
  }
  const auto method_of = [](const ProfileEntry& e) {
    if (!e.ok()) return std::string("none");
    std::string m = to_string(e.method.front());
    for (auto x : e.method) {
      if (x != e.method.front()) return std::string("mixed");
    }
    return m;
  };
  if (c.format == "json") {
    json a = json::array();
    for (const auto& e : prof.entries) {
      json r = {{"k", e.k}, {"status", e.ok() ? "ok" : "budget_error"}};
      if (e.ok()) {
        r["W"] = estimate_json(e.W);
        r["V_k"] = json12(e.V_k);
        r["subspaces"] = e.subspaces;
        r["method"] = method_of(e);
        r["unconverged"] = e.unconverged;
        r["vrad"] = {{"mean", json12(e.vrad_summary.mean)},
                     {"sd", json12(e.vrad_summary.sd)},
                     {"min", json12(e.vrad_summary.min)},
                     {"max", json12(e.vrad_summary.max)}};
        json wp = json::array();
        for (const auto& [p, est] : e.Wp) {
          json x = estimate_json(est);
          x["p"] = json12(p);
          wp.push_back(x);
        }
        r["W_p"] = wp;
      } else {
        r["error"] = *e.error;
        r["method"] = e.error_method;
      }
      a.push_back(r);
    }
    out.primary = json({{"body", prof.body_id}, {"n", prof.n}, {"profile", a}}).dump(2) + "\n";
  } else {
    std::vector<std::string> header = {"k",        "W",        "W_se",      "W_ci_lo",  "W_ci_hi",
                                       "V_k",      "subspaces", "vrad_mean", "vrad_sd", "vrad_min",
                                       "vrad_max", "method",    "unconverged", "status"};
    for (double p : c.p_list) {
      header.push_back("W_p=" + fmt12(p));
      header.push_back("W_p=" + fmt12(p) + "_se");
    }
    CsvTable t(header);
    for (const auto& e : prof.entries) {
      t.row() << e.k;
      if (e.ok()) {
        t << e.W.value << e.W.std_error << e.W.ci_lo << e.W.ci_hi << e.V_k << e.subspaces << e.vrad_summary.mean
          << e.vrad_summary.sd << e.vrad_summary.min << e.vrad_summary.max << method_of(e) << e.unconverged << "ok";
        for (double p : c.p_list) t << e.moment(p)->value << e.moment(p)->std_error;
      } else {
        t << "" << "" << "" << "" << "" << "" << "" << "" << "" << "" << e.error_method << "" << "budget_error";
        for (std::size_t i = 0; i < 2 * c.p_list.size(); ++i) t << "";
      }
    }
    out.primary = t.str();
  }
  return out;
}

inline int clip_tail_k(const Body& body, int k) { return std::max(1, std::min(k, body.dim() - 1)); }

inline std::vector<CheckResult> suite_core(const Body& body, const RunConfig& c, const SeedStream& root) {
  CheckOptions copt{c.ceiling, c.kappa};
  ProfileOptions opt;
  opt.subspaces = c.subspaces;
  opt.sandwich.tol = c.tol;
  opt.mean_widths = true;
  opt.width_directions = c.width_directions;
  std::vector<int> ks = c.k_list.empty() ? default_k_list(body) : c.k_list;
  if (std::find(ks.begin(), ks.end(), 1) == ks.end()) ks.insert(ks.begin(), 1);
  const QuermassProfile prof = quermass_profile(body, ks, opt, root.child(0));
  std::vector<CheckResult> out;
  const Estimate beta = beta_star(body, c.samples, root.child(1));
  if (detail::ok_entries(prof).size() >= 2) out.push_back(check_alexandrov(prof));
  out.push_back(check_main1_plateau(prof, beta, copt));
  out.push_back(check_urysohn_projections(prof, c.tol));
  out.push_back(check_k1_degeneracy(body, c.subspaces, c.samples, root.child(2)));
  for (const auto& e : prof.entries) {
    if (!e.ok()) {
      CheckResult r;
      r.check = "profile_k" + std::to_string(e.k);
      r.anchor = "budget";
      r.skip(*e.error);
      out.push_back(r);
    }
  }
  return out;
}

inline std::vector<CheckResult> suite_concentration(const Body& body, const RunConfig& c, const SeedStream& root,
                                                    TailReport* tails_out = nullptr) {
  const int k = clip_tail_k(body, c.tail_k);
  TailOptions topt;
  topt.samples = c.samples;
  topt.sandwich.tol = c.tol;
  TailReport rep = tail_estimates(body, k, c.eps_list, c.subspaces, root.child(0), topt);
  std::vector<CheckResult> out = check_tails(rep);
  out.push_back(
      check_mean_width_concentration(body, k, c.t_list, c.subspaces, c.samples, root.child(1), c.width_directions));
  if (tails_out != nullptr) *tails_out = std::move(rep);
  return out;
}

inline std::vector<CheckResult> suite_reverse_holder(const Body& body, const RunConfig& c, const SeedStream& root) {
  ReverseHolderOptions opt;
  opt.check = {c.ceiling, c.kappa};
  opt.subspaces = c.subspaces;
  opt.samples = c.samples;
  opt.sandwich.tol = c.tol;
  std::vector<CheckResult> out = check_reverse_holder(body, c.q_list, root.child(0), opt);
  const int k = 2;
  if (body.dim() > k) {
    for (std::size_t i = 0; i < c.q_list.size(); ++i) {
      const double q = c.q_list[i];
      if (q < k) continue;
      CheckResult r = check_dimension_lift(body, k, q, c.subspaces, c.samples, root.child({1, i}), opt.check);
      r.check += "_q" + fmt12(q);
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::vector<CheckResult> suite_moments(const Body& body, const RunConfig& c, const SeedStream& root) {
  CheckOptions copt{c.ceiling, c.kappa};
  std::vector<CheckResult> out = check_gaussian_functionals(body, c.samples, root.child(0), copt);
  const SupportSample s = sample_support(body, c.samples, root.child(1));
  const double ks = std::max(1.0, k_star(s, circumradius(body)).estimate.value);
  for (TailKind kind : {TailKind::subgaussian, TailKind::subexponential}) {
    for (auto& r : moment_profile_check(s.gaussian, ks, kind, copt)) {
      if (kind == TailKind::subexponential && r.check == "median_deviation") continue;
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::vector<CheckResult> suite_ordering(const Body& body, const RunConfig& c, const SeedStream& root) {
  return {check_plateau_ordering(body.dim(), c.samples, root, {c.ceiling, c.kappa})};
}

inline RunOutput report_output(const VerificationReport& rep, const RunConfig& c) {
  RunOutput out;
  out.primary = c.format == "json" ? report_json(rep).dump(2) + "\n" : report_csv(rep).str();
  out.checks_failed = rep.any_failed();
  return out;
}

inline RunOutput run_verify(const Body& body, const RunConfig& c, const SeedStream& root) {
  static const std::vector<std::string> suites = {"core", "concentration", "reverse_holder", "moments", "ordering"};
  if (c.suite != "all" && std::find(suites.begin(), suites.end(), c.suite) == suites.end()) {
    throw ValidationError("verify: unknown suite '" + c.suite + "'");
  }
  VerificationReport rep;
  rep.body = body.label.empty() ? body.kind() : body.label;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const std::string& name = suites[i];
    if (c.suite != "all" && c.suite != name) continue;
    const SeedStream s = root.child(i);
    if (name == "core") rep.append(suite_core(body, c, s));
    if (name == "concentration") rep.append(suite_concentration(body, c, s));
    if (name == "reverse_holder") rep.append(suite_reverse_holder(body, c, s));
    if (name == "moments") rep.append(suite_moments(body, c, s));
    if (name == "ordering") rep.append(suite_ordering(body, c, s));
  }
  return report_output(rep, c);
}

inline RunOutput run_tails(const Body& body, const RunConfig& c, const SeedStream& root) {
  if (c.eps_list.empty()) throw ValidationError("tails: --eps list is empty");
  if (c.t_list.empty()) throw ValidationError("tails: --t list is empty");
  RunConfig cc = c;
  if (c.k_list.size() == 1) cc.tail_k = c.k_list.front();
  TailReport rep;
  const auto checks = suite_concentration(body, cc, root, &rep);
  RunOutput out;
  out.plot = plot_rows(rep);
  VerificationReport vr;
  vr.body = body.label.empty() ? body.kind() : body.label;
  vr.checks = checks;
  out.checks_failed = vr.any_failed();
  if (c.format == "json") {
    json recs = json::array();
    for (const auto& t : rep.records) {
      recs.push_back({{"k", t.k},
                      {"direction", to_string(t.direction)},
                      {"epsilon", json12(t.epsilon)},
                      {"hits", t.hits},
                      {"subspaces", t.subspaces},
                      {"frequency", json12(t.frequency)},
                      {"ci_lo", json12(t.ci_lo)},
                      {"ci_hi", json12(t.ci_hi)},
                      {"predicted_exponent", json12(t.predicted_exponent)}});
    }
    json j = report_json(vr);
    j["k"] = rep.k;
    j["W_reference"] = estimate_json(rep.W_reference);
    j["k_star"] = estimate_json(rep.k_star);
    j["beta_star"] = estimate_json(rep.beta_star);
    j["records"] = recs;
    out.primary = j.dump(2) + "\n";
  } else {
    CsvTable t({"k", "direction", "epsilon", "hits", "subspaces", "frequency", "ci_lo", "ci_hi",
                "predicted_exponent"});
    for (const auto& r : rep.records) {
      t.row() << r.k << to_string(r.direction) << r.epsilon << r.hits << r.subspaces << r.frequency << r.ci_lo
              << r.ci_hi << r.predicted_exponent;
    }
    out.primary = t.str();
  }
  return out;
}

inline RunOutput run_zonoid(const std::optional<Body>& body, const RunConfig& c, const SeedStream& root) {
  std::optional<double> q;
  if (body) {
    const auto* z = std::get_if<LqZonoid>(&body->variant());
    if (z == nullptr) throw ValidationError("zonoid: --body must be an lq_zonoid");
    q = z->q;
  }
  if (c.q_list.size() == 1) q = c.q_list.front();
  if (!q) throw ValidationError("zonoid: give --q or an lq_zonoid --body");
  if (c.n_list.empty()) throw ValidationError("zonoid: --n list is empty");
  ZonoidOptions opt;
  opt.check = {c.ceiling, c.kappa};
  opt.subspaces = c.subspaces;
  opt.samples = c.samples;
  opt.sandwich.tol = c.tol;
  if (!c.k_list.empty()) opt.k_list = c.k_list;
  VerificationReport rep;
  rep.body = "Zq_basis(q=" + fmt12(*q) + ")";
  rep.checks = zonoid_experiment(*q, c.n_list, root.child(0), opt);
  if (body) {
    std::vector<int> ks;
    for (int k : opt.k_list) {
      if (k >= 1 && k < body->dim()) ks.push_back(k);
    }
    auto more = check_zonoid_plateau(*body, ks, c.subspaces, c.samples, root.child(1), opt.check, opt.sandwich);
    for (auto& r : more) r.check += "_body";
    rep.append(std::move(more));
  }
  RunOutput out = report_output(rep, c);
  for (const auto& r : rep.checks) {
    auto rows = plot_rows(r);
    out.plot.insert(out.plot.end(), rows.begin(), rows.end());
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  static const std::vector<std::string> experiments = {"params", "profile", "projvol", "verify", "tails", "zonoid"};
  if (std::find(experiments.begin(), experiments.end(), c.experiment) == experiments.end()) {
    throw ValidationError("config: unknown experiment '" + c.experiment + "'");
  }
  if (c.format != "csv" && c.format != "json") throw ValidationError("config: --format must be csv or json");
  if (c.experiment != "zonoid" && c.body_file.empty() && !c.body_inline) {
    throw ValidationError("config: --body is required");
  }
  if (c.samples < 1) throw ValidationError("config: --samples must be >= 1");
  if (c.subspaces < 1) throw ValidationError("config: --subspaces must be >= 1");
  if (!(c.tol > 0.0)) throw ValidationError("config: --tol must be > 0");
  if (!(c.ceiling > 0.0)) throw ValidationError("config: --ceiling must be > 0");
  if (!(c.kappa > 0.0)) throw ValidationError("config: kappa must be > 0");
  if (c.width_directions < 2) throw ValidationError("config: width_directions must be >= 2");
  const bool needs_q = c.experiment == "verify" && (c.suite == "reverse_holder" || c.suite == "all");
  if (needs_q && c.q_list.empty()) throw ValidationError("config: --q list is empty");
  const bool needs_eps = c.experiment == "tails" || (c.experiment == "verify" && (c.suite == "concentration" || c.suite == "all"));
  if (needs_eps && (c.eps_list.empty() || c.t_list.empty())) throw ValidationError("config: --eps/--t list is empty");
}

inline json manifest_json(const RunConfig& c, double wall_seconds) {
  return {{"config", config_to_json(c)},
          {"config_hash", hex64(config_hash(c))},
          {"seed", c.seed},
          {"version", kVersion},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"wall_time_s", wall_seconds}};
}

/// Runs one experiment. The primary output goes to c.out (stdout when
/// empty) and a manifest to c.out + ".manifest.json"; diagnostics go to err.
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    validate(c);
    std::optional<Body> body;
    if (c.body_inline) {
      try {
        body = body_from_json(*c.body_inline);
      } catch (const json::exception& e) {
        throw ValidationError(std::string("body: ") + e.what());
      }
    } else if (!c.body_file.empty()) {
      body = load_body(c.body_file);
    }
    const SeedStream root = derive_stream(c.seed);
    RunOutput out;
    if (c.experiment == "params") out = detail::run_params(*body, c, root);
    if (c.experiment == "projvol") out = detail::run_projvol(*body, c, root);
    if (c.experiment == "profile") out = detail::run_profile(*body, c, root);
    if (c.experiment == "verify") out = detail::run_verify(*body, c, root);
    if (c.experiment == "tails") out = detail::run_tails(*body, c, root);
    if (c.experiment == "zonoid") out = detail::run_zonoid(body, c, root);

    if (c.out.empty()) {
      std::cout << out.primary;
    } else {
      detail::write_file(c.out, out.primary);
    }
    if (!c.plot.empty()) detail::write_file(c.plot, emit_plotdata(out.plot));
    if (!c.out.empty()) {
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      detail::write_file(c.out + ".manifest.json", manifest_json(c, wall).dump(2) + "\n");
    }
    if (out.budget) {
      err << "budget error at k=" << out.budget->k() << " (" << out.budget->method() << "): " << out.budget->what()
          << "\n";
      return kExitBudget;
    }
    return out.checks_failed ? kExitFailedChecks : kExitOk;
  } catch (const BudgetError& e) {
    err << "budget error at k=" << e.k() << " (" << e.method() << "): " << e.what() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "precondition error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UnsupportedGauge& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kubota
