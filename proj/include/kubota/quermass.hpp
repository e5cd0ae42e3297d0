#pragma once

// W_[k], W_[k,p] and V_k by averaging projection volumes over Haar
// subspaces, plus the inequality checks built on them. Absolute constants
// in the inequalities are fitted from data and compared to a ceiling.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kubota/bodies.hpp"
#include "kubota/errors.hpp"
#include "kubota/functionals.hpp"
#include "kubota/linrand.hpp"
#include "kubota/parallel.hpp"
#include "kubota/projvol.hpp"

namespace kubota {

struct VradSummary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// One k of a profile. `error` is set (and the estimates left empty) when
/// the volume kernel hit a budget cap at this k.
struct ProfileEntry {
  int k = 0;
  Estimate W;
  std::vector<std::pair<double, Estimate>> Wp;
  double V_k = 0.0;
  int subspaces = 0;
  VradSummary vrad_summary;
  std::vector<double> vrad;
  /// w(P_E A) per subspace with its standard error; filled on request.
  std::vector<Estimate> mean_width;
  std::vector<VolumeMethod> method;
  /// Subspaces whose sandwich bracket missed its tolerance.
  int unconverged = 0;
  /// Largest relative half-width (upper - lower) / (2 value) over subspaces.
  double max_bracket = 0.0;
  bool direct = false;
  std::optional<std::string> error;
  std::string error_method;

  bool ok() const { return !error.has_value(); }
  const Estimate* moment(double p) const {
    for (const auto& [q, e] : Wp) {
      if (q == p) return &e;
    }
    return nullptr;
  }
};

struct QuermassProfile {
  std::string body_id;
  int n = 0;
  std::vector<ProfileEntry> entries;

  const ProfileEntry* at(int k) const {
    for (const auto& e : entries) {
      if (e.k == k && e.ok()) return &e;
    }
    return nullptr;
  }
  bool complete() const {
    return std::all_of(entries.begin(), entries.end(), [](const ProfileEntry& e) { return e.ok(); });
  }
};

struct ProfileOptions {
  std::vector<double> p_list;
  int subspaces = 2000;
  SandwichOptions sandwich;
  bool mean_widths = false;
  std::int64_t width_directions = 1000;
};

/// V_k = C(n,k) (omega_n / omega_{n-k}) W^k, in the log domain.
inline double v_k_from_profile(int n, int k, double W) {
  if (k < 1 || k > n) throw DimensionError("v_k_from_profile: need 1 <= k <= n");
  if (!(W >= 0.0)) throw PreconditionError("v_k_from_profile: W must be >= 0");
  if (W == 0.0) return 0.0;
  const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_binom + log_unit_ball_volume(n) - log_unit_ball_volume(n - k) + k * std::log(W));
}

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline constexpr std::uint64_t kSubspaceTag = 0;
inline constexpr std::uint64_t kWidthTag = 1;

/// Moment estimate (mean v^p)^(1/p) of vrad values; zero radii make every
/// negative moment 0.
inline Estimate vrad_moment(const std::vector<double>& v, double p) {
  if (p < 0.0 && std::any_of(v.begin(), v.end(), [](double x) { return x <= 0.0; })) {
    return Estimate::exact(0.0, static_cast<std::int64_t>(v.size()));
  }
  if (p > 0.0 && std::all_of(v.begin(), v.end(), [](double x) { return x <= 0.0; })) {
    return Estimate::exact(0.0, static_cast<std::int64_t>(v.size()));
  }
  if (p > 0.0 && std::any_of(v.begin(), v.end(), [](double x) { return x <= 0.0; })) {
    std::vector<double> pos;
    for (double x : v) {
      if (x > 0.0) pos.push_back(x);
    }
    const double frac = static_cast<double>(pos.size()) / static_cast<double>(v.size());
    Estimate e = power_mean(pos, p);
    const double scale = std::pow(frac, 1.0 / p);
    return Estimate::from_se(e.value * scale, e.std_error * scale, static_cast<std::int64_t>(v.size()));
  }
  return power_mean(v, p);
}

inline VradSummary summarize(const std::vector<double>& v) {
  VradSummary s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  const Estimate m = sample_mean(v);
  s.mean = m.value;
  s.sd = m.std_error * std::sqrt(static_cast<double>(v.size()));
  return s;
}

}  // namespace detail

/// Profile of W_[k] and W_[k,p] over k_list.
///
/// Subspace j at dimension k uses stream.child({0, k, j}); the same M
/// subspaces serve every p. k = n is the direct path |A| with no sampling.
/// Budget errors at one k are recorded in that entry and the rest of the
/// profile is still computed.
inline QuermassProfile quermass_profile(const Body& body, const std::vector<int>& k_list,
                                        const ProfileOptions& opt, const SeedStream& stream) {
  const int n = body.dim();
  if (opt.subspaces < 50) throw PreconditionError("quermass_profile: need at least 50 subspaces");
  if (k_list.empty()) throw PreconditionError("quermass_profile: empty k list");
  for (double p : opt.p_list) {
    if (p == 0.0) throw PreconditionError("quermass_profile: p = 0 is not a moment order");
  }
  QuermassProfile prof;
  prof.body_id = body.label.empty() ? body.kind() : body.label;
  prof.n = n;
  ProjectionVolumeOptions vopt{opt.sandwich};
  for (int k : k_list) {
    if (k < 1 || k > n) throw DimensionError("quermass_profile: k out of range 1..n");
    ProfileEntry e;
    e.k = k;
    try {
      if (k == n) {
        const ProjectedBody pb = full_projection(body);
        const VolumeResult v = projection_volume(pb, vopt);
        e.direct = true;
        e.subspaces = 1;
        e.vrad = {vrad(v, k)};
        e.method = {v.method};
        e.unconverged = v.converged ? 0 : 1;
        e.max_bracket = v.value > 0.0 ? (v.upper - v.lower) / (2.0 * v.value) : 0.0;
        if (opt.mean_widths) {
          e.mean_width = {proj_mean_width(pb, opt.width_directions, stream.child({detail::kWidthTag,
                                                                                   static_cast<std::uint64_t>(k)}))};
        }
        const double r = e.vrad.front();
        e.W = v.converged && v.lower == v.upper
                  ? Estimate::exact(r)
                  : Estimate{r, 0.0, 1, vrad(v.lower, k), vrad(v.upper, k)};
        for (double p : opt.p_list) e.Wp.emplace_back(p, e.W);
      } else {
        const int M = opt.subspaces;
        e.subspaces = M;
        e.vrad.assign(static_cast<std::size_t>(M), 0.0);
        e.method.assign(static_cast<std::size_t>(M), VolumeMethod::exact_zonotope);
        std::vector<double> bracket(static_cast<std::size_t>(M), 0.0);
        std::vector<char> unconv(static_cast<std::size_t>(M), 0);
        if (opt.mean_widths) e.mean_width.assign(static_cast<std::size_t>(M), Estimate{});
        const SeedStream width_stream = stream.child({detail::kWidthTag, static_cast<std::uint64_t>(k)});
        detail::parallel_for(static_cast<std::size_t>(M), [&](std::size_t j) {
          SeedStream s = stream.child({detail::kSubspaceTag, static_cast<std::uint64_t>(k), j});
          const Subspace E = sample_haar_subspace(s, n, k);
          const ProjectedBody pb = project_body(body, E);
          const VolumeResult v = projection_volume(pb, vopt);
          e.vrad[j] = vrad(v, k);
          e.method[j] = v.method;
          unconv[j] = v.converged ? 0 : 1;
          bracket[j] = v.value > 0.0 ? (v.upper - v.lower) / (2.0 * v.value) : 0.0;
          if (opt.mean_widths) e.mean_width[j] = proj_mean_width(pb, opt.width_directions, width_stream);
        });
        e.unconverged = static_cast<int>(std::count(unconv.begin(), unconv.end(), 1));
        e.max_bracket = *std::max_element(bracket.begin(), bracket.end());
        e.W = detail::vrad_moment(e.vrad, k);
        for (double p : opt.p_list) e.Wp.emplace_back(p, detail::vrad_moment(e.vrad, p * k));
      }
      e.vrad_summary = detail::summarize(e.vrad);
      e.V_k = v_k_from_profile(n, k, e.W.value);
    } catch (const BudgetError& err) {
      e.error = err.what();
      e.error_method = err.method();
      e.vrad.clear();
      e.method.clear();
      e.mean_width.clear();
    }
    prof.entries.push_back(std::move(e));
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Verification reports

struct CheckResult {
  std::string check;
  std::string anchor;
  std::vector<std::pair<std::string, double>> fitted_constants;
  /// Distance from failure in the check's own units; negative means failed.
  double margin = 0.0;
  bool pass = false;
  /// "pass", "fail", or "skipped".
  std::string status;
  std::int64_t samples = 0;
  std::string note;
  /// Auxiliary statistics behind the decision.
  std::vector<std::pair<std::string, double>> values;

  void decide(bool ok) {
    pass = ok;
    status = ok ? "pass" : "fail";
  }
  void skip(std::string why) {
    pass = false;
    status = "skipped";
    note = std::move(why);
  }
};

struct VerificationReport {
  std::string body;
  std::vector<CheckResult> checks;

  bool any_failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "fail"; });
  }
  void append(std::vector<CheckResult> more) {
    for (auto& c : more) checks.push_back(std::move(c));
  }
};

struct CheckOptions {
  /// Acceptance ceiling for every fitted constant.
  double ceiling = 10.0;
  /// Range constant in the "k <= kappa / beta_*" style preconditions.
  double kappa = 1.0;
};

/// Shape sqrt(x log(e/x)) with x = k beta_*, the plateau deficit scale.
inline double plateau_shape(int k, double beta) {
  const double x = k * beta;
  if (!(x > 0.0) || x >= std::numbers::e) return 0.0;
  return std::sqrt(x * std::log(std::numbers::e / x));
}

namespace detail {

inline std::vector<const ProfileEntry*> ok_entries(const QuermassProfile& prof) {
  std::vector<const ProfileEntry*> out;
  for (const auto& e : prof.entries) {
    if (e.ok()) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(), [](const ProfileEntry* a, const ProfileEntry* b) { return a->k < b->k; });
  return out;
}

inline std::int64_t profile_samples(const QuermassProfile& prof) {
  std::int64_t s = 0;
  for (const auto& e : prof.entries) s += e.subspaces;
  return s;
}

inline double wilson_half(double f, double n) {
  const double z2 = kZ95 * kZ95;
  return kZ95 * std::sqrt(f * (1.0 - f) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

inline std::pair<double, double> wilson(std::int64_t hits, std::int64_t total) {
  const double n = static_cast<double>(total);
  const double f = static_cast<double>(hits) / n;
  const double z2 = kZ95 * kZ95;
  const double center = (f + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = wilson_half(f, n);
  const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = hits == total ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

}  // namespace detail

/// Consecutive W_[k] must not increase beyond 3 combined standard errors.
inline CheckResult check_alexandrov(const QuermassProfile& prof) {
  const auto es = detail::ok_entries(prof);
  if (es.size() < 2) throw PreconditionError("check_alexandrov: need at least two k values");
  CheckResult r;
  r.check = "alexandrov";
  r.anchor = "alexandrov_monotonicity";
  r.samples = detail::profile_samples(prof);
  double margin = kInf;
  for (std::size_t i = 0; i + 1 < es.size(); ++i) {
    const auto& a = *es[i];
    const auto& b = *es[i + 1];
    const double allow = a.W.value + 3.0 * (a.W.std_error + b.W.std_error) + 1e-12 * a.W.value;
    margin = std::min(margin, allow - b.W.value);
    r.values.emplace_back("W_" + std::to_string(a.k), a.W.value);
  }
  r.values.emplace_back("W_" + std::to_string(es.back()->k), es.back()->W.value);
  r.margin = margin;
  r.decide(margin >= 0.0);
  return r;
}

/// Fits c in W_[1]/W_[k] - 1 <= c sqrt(k b log(e/(k b))) over profile k with
/// 2 <= k <= kappa/b, b = beta_*; also requires W_[k] <= W_[1] + 3 SE.
inline CheckResult check_main1_plateau(const QuermassProfile& prof, const Estimate& beta,
                                       const CheckOptions& opt = {}) {
  if (!(beta.value > 0.0)) throw PreconditionError("check_main1_plateau: beta_* must be > 0");
  const ProfileEntry* w1 = prof.at(1);
  if (w1 == nullptr) throw PreconditionError("check_main1_plateau: profile lacks k = 1");
  CheckResult r;
  r.check = "main1_plateau";
  r.anchor = "reverse_alexandrov_plateau";
  r.samples = detail::profile_samples(prof) + beta.n_samples;
  const double range = opt.kappa / beta.value;
  double c = 0.0;
  bool dominated = true;
  double dom_margin = kInf;
  int used = 0;
  for (const ProfileEntry* e : detail::ok_entries(prof)) {
    if (e->k < 2) continue;
    const double allow = w1->W.value + 3.0 * (w1->W.std_error + e->W.std_error) + 1e-12 * w1->W.value;
    dom_margin = std::min(dom_margin, allow - e->W.value);
    dominated = dominated && e->W.value <= allow;
    if (e->k > range) continue;
    const double s = plateau_shape(e->k, beta.value);
    if (!(s > 0.0)) continue;
    const double deficit = e->W.value > 0.0 ? w1->W.value / e->W.value - 1.0 : kInf;
    r.values.emplace_back("deficit_" + std::to_string(e->k), deficit);
    c = std::max(c, deficit / s);
    ++used;
  }
  r.fitted_constants.emplace_back("c", c);
  r.values.emplace_back("beta_star", beta.value);
  r.values.emplace_back("plateau_range", range);
  if (dom_margin != kInf) r.values.emplace_back("dominance_margin", dom_margin);
  if (used == 0) r.note = "no profile k in 2..kappa/beta_*";
  r.margin = opt.ceiling - c;
  r.decide(c <= opt.ceiling && dominated);
  return r;
}

/// Urysohn's inequality on every sampled projection: w(P_E A) >= vrad(P_E A)
/// up to 3 SE of the width and the sandwich half-width.
inline CheckResult check_urysohn_projections(const QuermassProfile& prof, double tol = 1e-3) {
  CheckResult r;
  r.check = "urysohn_projections";
  r.anchor = "urysohn_per_projection";
  double margin = kInf;
  std::int64_t count = 0;
  for (const ProfileEntry* e : detail::ok_entries(prof)) {
    if (e->mean_width.size() != e->vrad.size()) {
      throw PreconditionError("check_urysohn_projections: profile lacks per-subspace mean widths");
    }
    for (std::size_t j = 0; j < e->vrad.size(); ++j) {
      const double v = e->vrad[j];
      const double slack = e->method[j] == VolumeMethod::sandwich ? tol * v : 1e-12 * v;
      const Estimate& w = e->mean_width[j];
      const double m = (w.value + 3.0 * w.std_error + slack - v) / std::max(v, 1e-300);
      margin = std::min(margin, m);
      ++count;
    }
  }
  if (count == 0) throw PreconditionError("check_urysohn_projections: empty profile");
  r.samples = count;
  r.margin = margin;
  r.decide(margin >= 0.0);
  return r;
}

/// W_[1] from subspace sampling against w from the Gaussian sample.
inline CheckResult check_k1_degeneracy(const Body& body, int subspaces, std::int64_t samples,
                                       const SeedStream& stream) {
  ProfileOptions popt;
  popt.subspaces = subspaces;
  const QuermassProfile prof = quermass_profile(body, {1}, popt, stream.child(0));
  const Estimate w = width_p(sample_support(body, samples, stream.child(1)), 1.0);
  const Estimate& W1 = prof.entries.front().W;
  CheckResult r;
  r.check = "k1_degeneracy";
  r.anchor = "kubota_k1_mean_width";
  r.samples = subspaces + samples;
  const double allow = 3.0 * (W1.std_error + w.std_error) + 1e-12 * w.value;
  r.margin = allow - std::abs(W1.value - w.value);
  r.values = {{"W_1", W1.value}, {"W_1_se", W1.std_error}, {"w", w.value}, {"w_se", w.std_error}};
  r.decide(r.margin >= 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Tails

enum class TailDirection { upper, lower };

inline std::string to_string(TailDirection d) { return d == TailDirection::upper ? "upper" : "lower"; }

struct TailRecord {
  int k = 0;
  double epsilon = 0.0;
  TailDirection direction = TailDirection::upper;
  std::int64_t hits = 0;
  std::int64_t subspaces = 0;
  double frequency = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// eps^2 k k_* (upper) or eps^2 / beta_* (lower).
  double predicted_exponent = 0.0;
};

struct TailFit {
  TailDirection direction = TailDirection::upper;
  int nonzero = 0;
  std::optional<double> slope;
  std::optional<double> r2;
  /// c in exp(-c * predicted exponent) implied by the slope.
  std::optional<double> c;
};

struct TailReport {
  int k = 0;
  Estimate W_reference;
  Estimate k_star;
  Estimate beta_star;
  std::vector<TailRecord> records;
  std::vector<TailFit> fits;
};

struct TailOptions {
  std::int64_t samples = 100000;
  SandwichOptions sandwich;
};

namespace detail {

/// Least squares y = a + b x; returns (b, R^2).
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double b = sxy / sxx;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {b, r2};
}

}  // namespace detail

/// Empirical frequencies of vrad >= (1+eps) W_[k] and vrad <= (1-eps) W_[k].
///
/// W_[k] comes from stream.child(0), the tested subspaces from
/// stream.child(1), and k_*, beta_* from a Gaussian sample on
/// stream.child(2), so no threshold is fitted on the data it tests.
inline TailReport tail_estimates(const Body& body, int k, const std::vector<double>& eps_list, int subspaces,
                                 const SeedStream& stream, const TailOptions& opt = {}) {
  const int n = body.dim();
  if (k < 1 || k > n - 1) throw DimensionError("tail_estimates: need 1 <= k <= n-1");
  if (eps_list.empty()) throw PreconditionError("tail_estimates: empty epsilon list");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw PreconditionError("tail_estimates: epsilon must be > 0");
  }
  ProfileOptions popt;
  popt.subspaces = subspaces;
  popt.sandwich = opt.sandwich;
  const QuermassProfile ref = quermass_profile(body, {k}, popt, stream.child(0));
  if (!ref.complete()) throw BudgetError(*ref.entries.front().error, k, ref.entries.front().error_method);
  const QuermassProfile test = quermass_profile(body, {k}, popt, stream.child(1));
  if (!test.complete()) throw BudgetError(*test.entries.front().error, k, test.entries.front().error_method);
  const SupportSample sample = sample_support(body, opt.samples, stream.child(2));

  TailReport rep;
  rep.k = k;
  rep.W_reference = ref.entries.front().W;
  rep.k_star = k_star(sample, circumradius(body)).estimate;
  rep.beta_star = beta_star(sample);
  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end());
  const auto& v = test.entries.front().vrad;
  const double W = rep.W_reference.value;
  for (TailDirection dir : {TailDirection::upper, TailDirection::lower}) {
    TailFit fit;
    fit.direction = dir;
    std::vector<double> xs;
    std::vector<double> ys;
    for (double e : eps) {
      TailRecord t;
      t.k = k;
      t.epsilon = e;
      t.direction = dir;
      t.subspaces = static_cast<std::int64_t>(v.size());
      for (double x : v) {
        if (dir == TailDirection::upper ? x >= (1.0 + e) * W : x <= (1.0 - e) * W) ++t.hits;
      }
      t.frequency = static_cast<double>(t.hits) / static_cast<double>(t.subspaces);
      std::tie(t.ci_lo, t.ci_hi) = detail::wilson(t.hits, t.subspaces);
      t.predicted_exponent = dir == TailDirection::upper ? e * e * k * rep.k_star.value
                                                         : e * e / rep.beta_star.value;
      if (t.hits > 0) {
        xs.push_back(e * e);
        ys.push_back(std::log(t.frequency));
      }
      rep.records.push_back(t);
    }
    fit.nonzero = static_cast<int>(xs.size());
    if (xs.size() >= 2) {
      const auto [slope, r2] = detail::linear_fit(xs, ys);
      fit.slope = slope;
      fit.r2 = r2;
      fit.c = dir == TailDirection::upper ? -slope / (k * rep.k_star.value) : -slope * rep.beta_star.value;
    }
    rep.fits.push_back(fit);
  }
  return rep;
}

/// Frequencies nonincreasing in eps within Wilson intervals, and a negative
/// log-frequency slope in eps^2 wherever at least 3 frequencies are nonzero.
inline std::vector<CheckResult> check_tails(const TailReport& rep) {
  std::vector<CheckResult> out;
  for (const TailFit& fit : rep.fits) {
    CheckResult r;
    r.check = "tail_" + to_string(fit.direction);
    r.anchor = fit.direction == TailDirection::upper ? "projection_upper_deviation" : "projection_lower_deviation";
    std::vector<const TailRecord*> rec;
    for (const auto& t : rep.records) {
      if (t.direction == fit.direction) rec.push_back(&t);
    }
    r.samples = rec.empty() ? 0 : 2 * rec.front()->subspaces;
    double margin = kInf;
    for (std::size_t i = 0; i + 1 < rec.size(); ++i) margin = std::min(margin, rec[i]->ci_hi - rec[i + 1]->ci_lo);
    bool ok = margin >= 0.0;
    for (const auto* t : rec) {
      r.values.emplace_back("freq_eps_" + detail::num(t->epsilon), t->frequency);
    }
    if (fit.slope) {
      r.values.emplace_back("slope", *fit.slope);
      r.values.emplace_back("r2", *fit.r2);
      r.fitted_constants.emplace_back(fit.direction == TailDirection::upper ? "c1" : "c2", *fit.c);
    }
    if (fit.nonzero >= 3) {
      ok = ok && *fit.slope < 0.0;
      margin = std::min(margin, -*fit.slope);
    } else {
      r.note = "fewer than 3 nonzero frequencies; slope not asserted";
    }
    r.margin = rec.size() < 2 && !fit.slope ? 0.0 : margin;
    r.decide(ok);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mean width concentration

/// nu{|w(P_E A) - w(A)| > t w(A)} per t, with c2 in exp(-c2 t^2 k k_*)
/// fitted conservatively from the Wilson upper limits.
inline CheckResult check_mean_width_concentration(const Body& body, int k, const std::vector<double>& t_list,
                                                  int subspaces, std::int64_t samples, const SeedStream& stream,
                                                  std::int64_t width_directions = 1000) {
  const int n = body.dim();
  if (k < 1 || k > n - 1) throw DimensionError("check_mean_width_concentration: need 1 <= k <= n-1");
  if (t_list.empty()) throw PreconditionError("check_mean_width_concentration: empty t list");
  if (subspaces < 1) throw PreconditionError("check_mean_width_concentration: need subspaces >= 1");
  const SupportSample sample = sample_support(body, samples, stream.child(0));
  const Estimate w = width_p(sample, 1.0);
  const Estimate ks = k_star(sample, circumradius(body)).estimate;
  std::vector<double> wE(static_cast<std::size_t>(subspaces));
  const SeedStream crn = stream.child(2);
  detail::parallel_for(wE.size(), [&](std::size_t j) {
    SeedStream s = stream.child({1, j});
    const Subspace E = sample_haar_subspace(s, n, k);
    wE[j] = proj_mean_width(project_body(body, E), width_directions, crn).value;
  });
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end());
  CheckResult r;
  r.check = "mean_width_concentration";
  r.anchor = "mean_width_concentration";
  r.samples = samples + subspaces;
  double c2 = kInf;
  double mono = kInf;
  double prev_hi = 1.0;
  for (double t : ts) {
    std::int64_t hits = 0;
    for (double x : wE) {
      if (std::abs(x - w.value) > t * w.value) ++hits;
    }
    const auto [lo, hi] = detail::wilson(hits, subspaces);
    mono = std::min(mono, prev_hi - lo);
    prev_hi = hi;
    r.values.emplace_back("freq_t_" + detail::num(t), static_cast<double>(hits) / subspaces);
    c2 = std::min(c2, -std::log(hi) / (t * t * k * ks.value));
  }
  r.fitted_constants.emplace_back("c2", c2);
  r.values.emplace_back("w", w.value);
  r.values.emplace_back("k_star", ks.value);
  r.margin = std::min(mono, c2);
  r.decide(mono >= 0.0 && c2 > 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Reverse Hoelder family

struct ReverseHolderOptions {
  CheckOptions check;
  std::vector<int> k_list{2, 3};
  int subspaces = 2000;
  std::int64_t samples = 100000;
  SandwichOptions sandwich;
};

/// The six reverse-Hoelder inequalities, each with its absolute constant
/// fitted as the smallest value that makes it hold on the q grid. Orders
/// outside an inequality's stated regime are listed in the note; an entry
/// with no admissible order is reported as skipped.
inline std::vector<CheckResult> check_reverse_holder(const Body& body, const std::vector<double>& q_list,
                                                     const SeedStream& stream, const ReverseHolderOptions& opt = {}) {
  const int n = body.dim();
  if (q_list.empty()) throw PreconditionError("check_reverse_holder: empty q list");
  for (double q : q_list) {
    if (!(q > 0.0)) throw PreconditionError("check_reverse_holder: q must be > 0");
  }
  const SupportSample sample = sample_support(body, opt.samples, stream.child(0));
  const Estimate w = width_p(sample, 1.0);
  const double beta = beta_star(sample).value;
  const double ks = k_star(sample, circumradius(body)).estimate.value;
  const double kappa = opt.check.kappa;
  const double ceiling = opt.check.ceiling;

  std::vector<int> ks_list;
  for (int k : opt.k_list) {
    if (k >= 1 && k <= n - 1) ks_list.push_back(k);
  }
  std::vector<double> p_list;
  for (double q : q_list) {
    p_list.push_back(q);
    p_list.push_back(-q);
  }
  ProfileOptions popt;
  popt.subspaces = opt.subspaces;
  popt.sandwich = opt.sandwich;
  popt.p_list = p_list;
  const QuermassProfile prof = ks_list.empty() ? QuermassProfile{} : quermass_profile(body, ks_list, popt, stream.child(1));

  const auto finish = [&](CheckResult& r, double c, int used, const std::string& excluded) {
    if (!excluded.empty()) r.note = "outside regime: " + excluded;
    r.values.emplace_back("beta_star", beta);
    r.values.emplace_back("k_star", ks);
    if (used == 0) {
      r.skip("regime unavailable" + (excluded.empty() ? std::string() : "; outside regime: " + excluded));
      return;
    }
    r.fitted_constants.emplace_back("c", c);
    r.margin = ceiling - c;
    r.decide(c <= ceiling);
  };
  const auto tag = [](double q, int k = 0) {
    std::string s = "q=" + detail::num(q);
    if (k > 0) s += "@k=" + std::to_string(k);
    return s + " ";
  };
  std::vector<CheckResult> out;

  {
    CheckResult r;
    r.check = "rh_positive_width";
    r.anchor = "width_moment_upper";
    r.samples = sample.size();
    double c = 0.0;
    int used = 0;
    for (double q : q_list) {
      const double ratio = width_p(sample, q).value / w.value;
      c = std::max(c, (ratio * ratio - 1.0) * ks / q);
      ++used;
    }
    finish(r, c, used, "");
    out.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.check = "rh_negative_width";
    r.anchor = "width_moment_lower";
    r.samples = sample.size();
    double c = 0.0;
    int used = 0;
    std::string excluded;
    for (double q : q_list) {
      if (!(q < kappa / beta) || !(q < n)) {
        excluded += tag(q);
        continue;
      }
      const double ratio = width_p(sample, -q).value / w.value;
      const double shape = std::min(q / ks, std::max(std::sqrt(beta), q * beta));
      c = std::max(c, (1.0 - ratio) / shape);
      ++used;
    }
    finish(r, c, used, excluded);
    out.push_back(std::move(r));
  }

  const auto profile_check = [&](const std::string& name, const std::string& anchor, auto&& admissible,
                                 auto&& ratio_fn) {
    CheckResult r;
    r.check = name;
    r.anchor = anchor;
    r.samples = detail::profile_samples(prof) + sample.size();
    double c = 0.0;
    int used = 0;
    std::string excluded;
    for (const ProfileEntry* e : detail::ok_entries(prof)) {
      for (double q : q_list) {
        if (!admissible(e->k, q)) {
          excluded += tag(q, e->k);
          continue;
        }
        c = std::max(c, ratio_fn(*e, q));
        ++used;
      }
    }
    for (const auto& e : prof.entries) {
      if (!e.ok()) excluded += "k=" + std::to_string(e.k) + "(budget) ";
    }
    finish(r, c, used, excluded);
    out.push_back(std::move(r));
  };
  const auto L = [&](int k) { return plateau_shape(k, beta); };

  profile_check(
      "rh_urysohn_moments", "quermass_moment_upper", [&](int, double) { return true; },
      [&](const ProfileEntry& e, double p) {
        const double ratio = e.moment(p)->value / w.value;
        return (ratio * ratio - 1.0) * ks / p;
      });
  profile_check(
      "rh_quermass_negative", "quermass_moment_lower",
      [&](int k, double p) { return k >= 2 && k <= kappa / beta && p <= kappa / (k * beta); },
      [&](const ProfileEntry& e, double p) {
        const double shape = std::max(L(e.k), p * e.k * beta);
        return (1.0 - e.moment(-p)->value / w.value) / shape;
      });
  profile_check(
      "rh_ratio_positive", "quermass_ratio_upper",
      [&](int k, double p) { return k >= 2 && k <= kappa / beta && p < kappa * ks; },
      [&](const ProfileEntry& e, double p) {
        const double shape = std::max(p / ks, L(e.k));
        return (e.moment(p)->value / e.W.value - 1.0) / shape;
      });
  profile_check(
      "rh_ratio_negative", "quermass_ratio_lower",
      [&](int k, double p) { return k >= 2 && k <= kappa / beta && p < kappa / (k * beta); },
      [&](const ProfileEntry& e, double p) {
        const double shape = std::max(p * e.k * beta, L(e.k));
        return (1.0 - e.moment(-p)->value / e.W.value) / shape;
      });
  return out;
}

/// (E r(P_E A)^{-q})^{1/q} <= (1 + c (k/q) log(eq/k)) w(A) / w_{-3q}(A)^2
/// with c fitted. Skipped when the order 3q is not available (3q >= n).
inline CheckResult check_dimension_lift(const Body& body, int k, double q, int subspaces, std::int64_t samples,
                                        const SeedStream& stream, const CheckOptions& opt = {}) {
  const int n = body.dim();
  if (q < k) throw PreconditionError("check_dimension_lift: need q >= k");
  if (k < 1 || k > n - 1) throw DimensionError("check_dimension_lift: need 1 <= k <= n-1");
  if (k > kInradiusMaxDim) {
    throw BudgetError("check_dimension_lift: k=" + std::to_string(k) + " exceeds inradius cap 4", k, "inradius_grid");
  }
  CheckResult r;
  r.check = "dimension_lift";
  r.anchor = "dimension_lift";
  if (!(3.0 * q < n)) {
    r.skip("regime unavailable: order -3q = " + detail::num(-3.0 * q) + " needs 3q < n = " + std::to_string(n));
    return r;
  }
  const SupportSample sample = sample_support(body, samples, stream.child(0));
  const double w = width_p(sample, 1.0).value;
  const double wneg = width_p(sample, -3.0 * q).value;
  std::vector<double> radii(static_cast<std::size_t>(subspaces));
  std::vector<char> exact(radii.size(), 1);
  detail::parallel_for(radii.size(), [&](std::size_t j) {
    SeedStream s = stream.child({1, j});
    const Subspace E = sample_haar_subspace(s, n, k);
    const Radius rad = proj_inradius(project_body(body, E));
    radii[j] = rad.value;
    exact[j] = rad.exact ? 1 : 0;
  });
  r.samples = samples + subspaces;
  const double left = detail::vrad_moment(radii, -q).value == 0.0 ? kInf
                                                                  : 1.0 / detail::vrad_moment(radii, -q).value;
  const double base = w / (wneg * wneg);
  const double shape = (k / q) * std::log(std::numbers::e * q / k);
  const double c = std::max(0.0, (left / base - 1.0) / shape);
  r.fitted_constants.emplace_back("c", c);
  r.values = {{"left", left}, {"w", w}, {"w_neg_3q", wneg}, {"right_base", base}};
  if (std::count(exact.begin(), exact.end(), 0) > 0) r.note = "inradii are grid upper bounds";
  r.margin = opt.ceiling - c;
  r.decide(c <= opt.ceiling);
  return r;
}

// ---------------------------------------------------------------------------
// Moment machinery

enum class TailKind { subgaussian, subexponential };

struct MedianDeviation {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  /// E|xi - med|
  double abs_dev_median = 0.0;
};

inline MedianDeviation median_deviation(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("median_deviation: empty sample");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  MedianDeviation out;
  out.median = n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  const Estimate m = detail::sample_mean(s);
  out.mean = m.value;
  out.sd = m.std_error * std::sqrt(static_cast<double>(n));
  double dev = 0.0;
  for (double x : s) dev += std::abs(x - out.median);
  out.abs_dev_median = dev / static_cast<double>(n);
  return out;
}

/// Checks the centered and noncentered moment bounds for a sample xi given
/// the tail parameter k. The tail constants are fitted from the sample with
/// A = 2 fixed: a = min over order statistics of log(A N / count) / (t^2 k)
/// (t k for subexponential tails), so the empirical law satisfies the tail
/// hypothesis exactly. Also checks E|xi - med| <= sqrt(Var xi).
inline std::vector<CheckResult> moment_profile_check(std::span<const double> xs, double k_param, TailKind tail,
                                                     const CheckOptions& opt = {}) {
  if (xs.size() < 1000) throw PreconditionError("moment_profile_check: need at least 1000 samples");
  if (!(k_param >= 1.0)) throw PreconditionError("moment_profile_check: k must be >= 1");
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("moment_profile_check: samples must be positive");
  }
  const auto N = static_cast<std::int64_t>(xs.size());
  const double nd = static_cast<double>(N);
  constexpr double A = 2.0;
  double mu = 0.0;
  for (double x : xs) mu += x;
  mu /= nd;
  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = std::abs(xs[i] - mu) / mu;
  std::sort(d.begin(), d.end());
  double a = kInf;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!(d[j] > 0.0)) continue;
    const double count = nd - static_cast<double>(j);
    const double scale = tail == TailKind::subgaussian ? d[j] * d[j] * k_param : d[j] * k_param;
    a = std::min(a, std::log(A * nd / count) / scale);
  }
  const auto central = [&](double s) {
    double acc = 0.0;
    for (double x : d) acc += std::pow(x, s);
    return acc / nd;
  };
  const auto raw_ratio = [&](double r) {
    double acc = 0.0;
    for (double x : xs) acc += std::pow(x / mu, r);
    return std::pow(acc / nd, 1.0 / r);
  };

  std::vector<CheckResult> out;
  const std::string suffix = tail == TailKind::subgaussian ? "" : "_subexp";
  {
    CheckResult r;
    r.check = "centered_moments" + suffix;
    r.anchor = tail == TailKind::subgaussian ? "centered_moment_bound" : "subexponential_moment_bound";
    r.samples = N;
    double margin = kInf;
    double c1 = 0.0;
    for (double s : {2.0, 3.0, 4.0}) {
      const double lhs = central(s);
      if (tail == TailKind::subgaussian) {
        const double rhs = std::isinf(a) ? 0.0 : std::pow(A * s / (a * k_param), s / 2.0);
        margin = std::min(margin, rhs - lhs + 1e-12 * rhs);
      } else {
        // (E|xi-mu|^s)^{1/s} <= mu c1 s / k, c1 in units of A/a.
        const double unit = std::isinf(a) ? 0.0 : A / a;
        if (unit > 0.0) c1 = std::max(c1, std::pow(lhs, 1.0 / s) * k_param / (s * unit));
      }
      r.values.emplace_back("moment_" + std::to_string(static_cast<int>(s)), lhs);
    }
    r.values.emplace_back("A", A);
    r.values.emplace_back("a", a);
    if (tail == TailKind::subgaussian) {
      r.margin = margin;
      r.decide(margin >= 0.0);
    } else {
      r.fitted_constants.emplace_back("c1", c1);
      r.margin = opt.ceiling - c1;
      r.decide(c1 <= opt.ceiling);
    }
    out.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.check = "noncentered_moments" + suffix;
    r.anchor = tail == TailKind::subgaussian ? "noncentered_moment_bound" : "subexponential_moment_bound";
    r.samples = N;
    double C = 0.0;
    for (double rr : {2.0, 4.0, 8.0}) {
      const double ratio = raw_ratio(rr);
      r.values.emplace_back("norm_ratio_" + std::to_string(static_cast<int>(rr)), ratio);
      if (std::isinf(a)) continue;
      if (tail == TailKind::subgaussian) {
        C = std::max(C, (ratio * ratio - 1.0) * a * k_param / (A * rr));
      } else {
        const double unit = A / a;
        C = std::max(C, (ratio - 1.0) * k_param * k_param / (rr * unit * unit));
      }
    }
    r.fitted_constants.emplace_back("C", C);
    r.margin = opt.ceiling - C;
    r.decide(C <= opt.ceiling);
    out.push_back(std::move(r));
  }
  {
    const MedianDeviation md = median_deviation(xs);
    CheckResult r;
    r.check = "median_deviation";
    r.anchor = "median_mean_deviation";
    r.samples = N;
    r.values = {{"mean", md.mean}, {"median", md.median}, {"sd", md.sd}, {"abs_dev_median", md.abs_dev_median}};
    const double gap = std::abs(md.mean - md.median);
    r.margin = md.sd - std::max(gap, md.abs_dev_median) + 1e-12 * md.sd;
    r.decide(r.margin >= 0.0);
    out.push_back(std::move(r));
  }
  return out;
}

/// Gaussian-functional consistency on one body: 1 <= I_1/m <= 1 + c sqrt(beta)
/// and beta_* <= c / k_*, each c fitted.
inline std::vector<CheckResult> check_gaussian_functionals(const Body& body, std::int64_t samples,
                                                           const SeedStream& stream, const CheckOptions& opt = {}) {
  const SupportSample sample = sample_support(body, samples, stream);
  const Estimate mean = detail::sample_mean(sample.gaussian);
  const Estimate med = gaussian_median(sample);
  const Estimate beta = beta_star(sample);
  const Estimate ks = k_star(sample, circumradius(body)).estimate;
  std::vector<CheckResult> out;
  {
    CheckResult r;
    r.check = "mean_median_ratio";
    r.anchor = "median_vs_first_moment";
    r.samples = sample.size();
    const double ratio = mean.value / med.value;
    const double c = beta.value > 0.0 ? std::max(0.0, (ratio - 1.0) / std::sqrt(beta.value)) : 0.0;
    // Lower side: ratio >= 1 up to the combined 3 SE.
    const double lower_margin = ratio - 1.0 + 3.0 * (mean.std_error + med.std_error) / med.value;
    r.fitted_constants.emplace_back("c", c);
    r.values = {{"I1", mean.value}, {"median", med.value}, {"ratio", ratio}, {"lower_margin", lower_margin}};
    r.margin = std::min(opt.ceiling - c, lower_margin);
    r.decide(c <= opt.ceiling && lower_margin >= 0.0);
    out.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.check = "beta_kstar_duality";
    r.anchor = "beta_vs_dvoretzky";
    r.samples = sample.size();
    const double c = beta.value * ks.value;
    r.fitted_constants.emplace_back("c", c);
    r.values = {{"beta_star", beta.value}, {"k_star", ks.value}};
    r.margin = opt.ceiling - c;
    r.decide(c <= opt.ceiling);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zonoids and suite-wide comparisons

/// B_q^n written as the L_q-zonoid of the counting measure on the basis.
inline Body basis_zonoid(int n, double q) {
  Body b = Body::lq_zonoid(q, Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n));
  b.label = "Zq_basis(n=" + std::to_string(n) + ",q=" + detail::num(q) + ")";
  return b;
}

/// Support of the basis zonoid against the l_p ball of the dual exponent.
inline CheckResult check_zonoid_dual_exponent(double q, const std::vector<int>& n_list, const SeedStream& stream,
                                              int directions = 1000) {
  CheckResult r;
  r.check = "zonoid_dual_exponent";
  r.anchor = "lp_ball_as_zonoid";
  const double p = std::isinf(q) ? 1.0 : (q == 1.0 ? kInf : q / (q - 1.0));
  double worst = 0.0;
  for (int n : n_list) {
    const Body z = basis_zonoid(n, q);
    const Body b = Body::lp_ball(n, p);
    SeedStream s = stream.child(static_cast<std::uint64_t>(n));
    for (int i = 0; i < directions; ++i) {
      const Eigen::VectorXd u = sample_gaussian(s, n);
      const double hz = support(z, u);
      worst = std::max(worst, std::abs(hz - support(b, u)) / hz);
    }
  }
  r.samples = static_cast<std::int64_t>(directions) * static_cast<std::int64_t>(n_list.size());
  r.values = {{"max_relative_difference", worst}};
  r.margin = 1e-12 - worst;
  r.decide(worst <= 1e-12);
  return r;
}

/// beta(B_q^n) n q^2 / 2^q across n, required constant within `factor`.
inline CheckResult check_zonoid_beta_scaling(double q, const std::vector<int>& n_list, std::int64_t samples,
                                             const SeedStream& stream, double factor = 1.5, double c0 = 1.0) {
  if (n_list.empty()) throw PreconditionError("zonoid_beta_scaling: empty n list");
  const int nmin = *std::min_element(n_list.begin(), n_list.end());
  if (!(q >= 1.0) || q > c0 * std::log(static_cast<double>(nmin))) {
    throw PreconditionError("zonoid_beta_scaling: need 1 <= q <= c0 log(min n)");
  }
  CheckResult r;
  r.check = "zonoid_beta_scaling";
  r.anchor = "lq_ball_variance_scaling";
  double lo = kInf;
  double hi = 0.0;
  for (int n : n_list) {
    const Body z = basis_zonoid(n, q);
    const Estimate b = beta_star(z, samples, stream.child(static_cast<std::uint64_t>(n)));
    const double scaled = b.value * n * q * q / std::pow(2.0, q);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    r.values.emplace_back("beta_n" + std::to_string(n), b.value);
    r.values.emplace_back("beta_n" + std::to_string(n) + "_se", b.std_error);
    r.values.emplace_back("scaled_n" + std::to_string(n), scaled);
  }
  r.samples = samples * static_cast<std::int64_t>(n_list.size());
  const double spread = hi / lo;
  r.fitted_constants.emplace_back("spread", spread);
  r.margin = factor - spread;
  r.decide(spread <= factor);
  return r;
}

/// Plateau check on an L_q-zonoid after validating that its measure is
/// isotropic; the deficit is also fitted against sqrt(k/n log(n/k)).
inline std::vector<CheckResult> check_zonoid_plateau(const Body& zonoid, const std::vector<int>& k_list,
                                                     int subspaces, std::int64_t samples, const SeedStream& stream,
                                                     const CheckOptions& opt = {}, SandwichOptions sandwich = {}) {
  const auto* z = std::get_if<LqZonoid>(&zonoid.variant());
  if (z == nullptr) throw ValidationError("check_zonoid_plateau: body is not an lq_zonoid");
  const IsotropyReport iso = check_isotropic(z->atoms, z->weights);
  if (!iso.is_isotropic) {
    throw ValidationError("check_zonoid_plateau: measure is not isotropic (deficit " + detail::num(iso.deficit) +
                          ")");
  }
  const int n = zonoid.dim();
  ProfileOptions popt;
  popt.subspaces = subspaces;
  popt.sandwich = sandwich;
  const QuermassProfile prof = quermass_profile(zonoid, k_list, popt, stream.child(0));
  const Estimate beta = beta_star(zonoid, samples, stream.child(1));
  CheckResult r = check_main1_plateau(prof, beta, opt);
  r.check = "zonoid_plateau";
  r.anchor = "isotropic_zonoid_plateau";
  const ProfileEntry* w1 = prof.at(1);
  double cq = 0.0;
  for (const ProfileEntry* e : detail::ok_entries(prof)) {
    if (e->k < 2 || e->k >= n) continue;
    const double shape = std::sqrt(static_cast<double>(e->k) / n * std::log(static_cast<double>(n) / e->k));
    cq = std::max(cq, (w1->W.value / e->W.value - 1.0) / shape);
  }
  r.fitted_constants.emplace_back("c_q", cq);
  r.values.emplace_back("isotropy_deficit", iso.deficit);
  r.values.emplace_back("n", n);
  r.decide(r.pass && cq <= opt.ceiling);
  r.margin = std::min(r.margin, opt.ceiling - cq);
  std::vector<CheckResult> out{std::move(r)};
  if (!prof.complete()) {
    for (const auto& e : prof.entries) {
      if (!e.ok()) out.front().note += "k=" + std::to_string(e.k) + " " + *e.error + "; ";
    }
  }
  return out;
}

struct ZonoidOptions {
  CheckOptions check;
  std::vector<int> k_list{1, 2, 3, 4, 5, 6};
  int subspaces = 2000;
  std::int64_t samples = 100000;
  double factor = 1.5;
  double c0 = 1.0;
  SandwichOptions sandwich;
};

inline std::vector<CheckResult> zonoid_experiment(double q, const std::vector<int>& n_list, const SeedStream& stream,
                                                  const ZonoidOptions& opt = {}) {
  std::vector<CheckResult> out;
  out.push_back(check_zonoid_dual_exponent(q, n_list, stream.child(0)));
  out.push_back(check_zonoid_beta_scaling(q, n_list, opt.samples, stream.child(1), opt.factor, opt.c0));
  for (int n : n_list) {
    std::vector<int> ks;
    for (int k : opt.k_list) {
      if (k >= 1 && k <= n - 1) ks.push_back(k);
    }
    auto more = check_zonoid_plateau(basis_zonoid(n, q), ks, opt.subspaces, opt.samples,
                                     stream.child({2, static_cast<std::uint64_t>(n)}), opt.check, opt.sandwich);
    for (auto& c : more) {
      c.check += "_n" + std::to_string(n);
      out.push_back(std::move(c));
    }
  }
  return out;
}

/// For {ball, cube, cross-polytope} in R^n: the plateau range kappa/beta_* is
/// widest for the ball, and k_* <= c / beta_* with one fitted c.
inline CheckResult check_plateau_ordering(int n, std::int64_t samples, const SeedStream& stream,
                                          const CheckOptions& opt = {}) {
  if (n < 2) throw DimensionError("check_plateau_ordering: need n >= 2");
  const std::vector<std::pair<std::string, Body>> suite = {
      {"ball", Body::lp_ball(n, 2.0)}, {"cube", Body::cube(n)}, {"cross_polytope", Body::lp_ball(n, 1.0)}};
  CheckResult r;
  r.check = "plateau_ordering";
  r.anchor = "plateau_dominance_ordering";
  double c = 0.0;
  double ball_range = 0.0;
  double other_range = 0.0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& [name, body] = suite[i];
    const SupportSample s = sample_support(body, samples, stream.child(i));
    const double beta = beta_star(s).value;
    const double ks = k_star(s, circumradius(body)).estimate.value;
    const double range = opt.kappa / beta;
    if (i == 0) {
      ball_range = range;
    } else {
      other_range = std::max(other_range, range);
    }
    c = std::max(c, ks * beta);
    r.values.emplace_back(name + "_beta_star", beta);
    r.values.emplace_back(name + "_k_star", ks);
    r.values.emplace_back(name + "_plateau_range", range);
  }
  r.samples = samples * static_cast<std::int64_t>(suite.size());
  r.fitted_constants.emplace_back("c", c);
  r.margin = std::min(opt.ceiling - c, (ball_range - other_range) / ball_range);
  r.decide(c <= opt.ceiling && ball_range >= other_range);
  return r;
}

}  // namespace kubota
