#pragma once

// Projections P_E A of a body and their volumes: exact determinant sums for
// zonotopes, exact hulls for V-polytopes, and a sandwich bracket for bodies
// known only through support and contact oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kubota/bodies.hpp"
#include "kubota/errors.hpp"
#include "kubota/functionals.hpp"
#include "kubota/hull.hpp"
#include "kubota/linrand.hpp"

namespace kubota {

/// Projected zonotope: generators are the columns (k x m).
struct ZonotopeK {
  Eigen::MatrixXd generators;
};

/// Projected V-polytope: vertices are the columns (k x m), closed under negation.
struct PolytopeK {
  Eigen::MatrixXd vertices;
};

/// Support oracle u -> h_A(F^T u) for a k x n frame F. When the parent is
/// Euclidean-ellipsoidal, `gram` holds G with h(u)^2 = u^T G u.
struct OracleK {
  std::shared_ptr<const Body> parent;
  Eigen::MatrixXd frame;
  std::optional<Eigen::MatrixXd> gram;
};

struct ProjectedBody {
  int k = 0;
  std::variant<ZonotopeK, PolytopeK, OracleK> rep;
};

namespace detail {

inline ProjectedBody project_frame(const Body& body, const Eigen::MatrixXd& frame, bool force_oracle) {
  if (frame.cols() != body.dim()) throw DimensionError("project_body: frame and body dimensions differ");
  const int k = static_cast<int>(frame.rows());
  const auto oracle = [&](std::optional<Eigen::MatrixXd> gram) {
    return ProjectedBody{k, OracleK{std::make_shared<const Body>(body), frame, std::move(gram)}};
  };
  if (const auto* c = std::get_if<Cube>(&body.variant())) {
    if (force_oracle) return oracle(std::nullopt);
    return {k, ZonotopeK{c->halfwidth * frame}};
  }
  if (const auto* b = std::get_if<LpBall>(&body.variant())) {
    if (b->p == 2.0) return oracle(Eigen::MatrixXd(b->radius * b->radius * frame * frame.transpose()));
    if (force_oracle) return oracle(std::nullopt);
    if (std::isinf(b->p)) return {k, ZonotopeK{b->radius * frame}};
    if (b->p == 1.0) {
      Eigen::MatrixXd v(k, 2 * frame.cols());
      v << b->radius * frame, -b->radius * frame;
      return {k, PolytopeK{std::move(v)}};
    }
    return oracle(std::nullopt);
  }
  if (const auto* e = std::get_if<Ellipsoid>(&body.variant())) {
    const Eigen::MatrixXd fa = frame * e->semiaxes.asDiagonal();
    return oracle(Eigen::MatrixXd(fa * fa.transpose()));
  }
  if (const auto* z = std::get_if<Zonotope>(&body.variant())) {
    if (force_oracle) return oracle(std::nullopt);
    return {k, ZonotopeK{frame * z->generators}};
  }
  if (const auto* z = std::get_if<LqZonoid>(&body.variant())) {
    if (z->q == 2.0) {
      const Eigen::MatrixXd fa = frame * z->atoms * z->weights.cwiseSqrt().asDiagonal();
      return oracle(Eigen::MatrixXd(fa * fa.transpose()));
    }
    if (force_oracle) return oracle(std::nullopt);
    if (z->q == 1.0) return {k, ZonotopeK{frame * z->atoms * z->weights.asDiagonal()}};
    return oracle(std::nullopt);
  }
  const auto& p = std::get<PolytopeV>(body.variant());
  if (force_oracle) return oracle(std::nullopt);
  return {k, PolytopeK{frame * p.vertices}};
}

}  // namespace detail

/// P_E A in frame coordinates. Cubes, zonotopes and L_1-zonoids become
/// ZonotopeK, cross-polytopes and V-polytopes PolytopeK, the rest OracleK.
/// `force_oracle` keeps the support-oracle form regardless of structure.
inline ProjectedBody project_body(const Body& body, const Subspace& E, bool force_oracle = false) {
  return detail::project_frame(body, E.frame(), force_oracle);
}

/// The body itself as a k = n "projection" (identity frame).
inline ProjectedBody full_projection(const Body& body, bool force_oracle = false) {
  return detail::project_frame(body, Eigen::MatrixXd::Identity(body.dim(), body.dim()), force_oracle);
}

inline double support(const ProjectedBody& pb, VecRef u) {
  if (u.size() != pb.k) throw DimensionError("support: direction length differs from k");
  struct Visitor {
    VecRef u;
    double operator()(const ZonotopeK& z) const { return (z.generators.transpose() * u).cwiseAbs().sum(); }
    double operator()(const PolytopeK& p) const { return (p.vertices.transpose() * u).maxCoeff(); }
    double operator()(const OracleK& o) const {
      if (o.gram) return std::sqrt(std::max(0.0, u.dot(*o.gram * u)));
      return support(*o.parent, o.frame.transpose() * u);
    }
  };
  return std::visit(Visitor{u}, pb.rep);
}

inline Eigen::VectorXd support_gradient(const ProjectedBody& pb, VecRef u) {
  if (u.size() != pb.k) throw DimensionError("support_gradient: direction length differs from k");
  if (u.cwiseAbs().maxCoeff() == 0.0) throw PreconditionError("support_gradient: u = 0");
  struct Visitor {
    VecRef u;
    Eigen::VectorXd operator()(const ZonotopeK& z) const {
      const Eigen::VectorXd s = z.generators.transpose() * u;
      Eigen::VectorXd signs(s.size());
      for (Eigen::Index i = 0; i < s.size(); ++i) signs[i] = detail::sign_or_plus(s[i]);
      return z.generators * signs;
    }
    Eigen::VectorXd operator()(const PolytopeK& p) const {
      const Eigen::VectorXd s = p.vertices.transpose() * u;
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < s.size(); ++j) {
        if (s[j] > s[best]) best = j;
      }
      return p.vertices.col(best);
    }
    Eigen::VectorXd operator()(const OracleK& o) const {
      if (o.gram) {
        const Eigen::VectorXd gu = *o.gram * u;
        return gu / std::sqrt(u.dot(gu));
      }
      return o.frame * support_gradient(*o.parent, o.frame.transpose() * u);
    }
  };
  return std::visit(Visitor{u}, pb.rep);
}

enum class VolumeMethod { exact_zonotope, exact_hull, sandwich };

inline std::string to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::exact_zonotope: return "exact_zonotope";
    case VolumeMethod::exact_hull: return "exact_hull";
    case VolumeMethod::sandwich: return "sandwich";
  }
  return "unknown";
}

struct VolumeResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  VolumeMethod method = VolumeMethod::exact_zonotope;
  int refinement_steps = 0;
  /// false only for a sandwich bracket that missed its tolerance.
  bool converged = true;

  static VolumeResult exact(double v, VolumeMethod m) { return {v, v, v, m, 0, true}; }
};

inline constexpr double kZonotopeBudget = 1e8;
inline constexpr int kSandwichMaxDim = 6;
inline constexpr int kInradiusMaxDim = 4;

namespace detail {

inline double binomial(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  return std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0));
}

/// sum_{i<j} |det(g_i, g_j)| in O(m log m): fold each generator into the
/// upper half plane, sort by angle, and every ordered pair then has a
/// nonnegative cross product.
inline double planar_det_sum(const Eigen::MatrixXd& g) {
  struct Item {
    double angle, x, y;
  };
  std::vector<Item> v;
  v.reserve(static_cast<std::size_t>(g.cols()));
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    double x = g(0, i);
    double y = g(1, i);
    if (x == 0.0 && y == 0.0) continue;
    if (y < 0.0 || (y == 0.0 && x < 0.0)) {
      x = -x;
      y = -y;
    }
    v.push_back({std::atan2(y, x), x, y});
  }
  std::stable_sort(v.begin(), v.end(), [](const Item& a, const Item& b) { return a.angle < b.angle; });
  double sx = 0.0;
  double sy = 0.0;
  double total = 0.0;
  for (const auto& it : v) {
    total += std::max(0.0, it.y * sx - it.x * sy);
    sx += it.x;
    sy += it.y;
  }
  return total;
}

/// sum over k-subsets S of |det G_S| by depth-first Gram-Schmidt: the
/// determinant is the product of successive residual norms. Once k-2
/// generators are fixed, the remaining factor is a planar determinant sum
/// over the other generators projected to the 2-D orthogonal complement.
class SubsetDetSum {
 public:
  using Small = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, hull::kMaxDim + 8, 1>;

  explicit SubsetDetSum(const Eigen::MatrixXd& g)
      : g_(g), k_(static_cast<int>(g.rows())), m_(static_cast<int>(g.cols())) {
    basis_.assign(static_cast<std::size_t>(k_), Small::Zero(k_));
    norms_ = g_.colwise().norm().transpose();
  }

  double run() {
    total_ = 0.0;
    comp_ = 0.0;
    rec(0, 0, 1.0);
    return total_ + comp_;
  }

 private:
  void add(double x) {
    const double t = total_ + x;
    comp_ += std::abs(total_) >= std::abs(x) ? (total_ - t) + x : (x - t) + total_;
    total_ = t;
  }

  Small residual(Small r, int depth) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < depth; ++i) r -= basis_[i].dot(r) * basis_[i];
    }
    return r;
  }

  /// Unit vector orthogonal to basis_[0..depth).
  Small complement(int depth) const {
    Small best_r;
    double best = -1.0;
    for (int i = 0; i < k_; ++i) {
      Small r = residual(Small::Unit(k_, i), depth);
      const double rn = r.norm();
      if (rn > best) {
        best = rn;
        best_r = r / rn;
      }
    }
    return best_r;
  }

  void rec(int start, int depth, double prod) {
    if (depth == k_ - 2) {
      if (m_ - start < 2) return;
      const Small a = complement(depth);
      basis_[depth] = a;
      const Small b = complement(depth + 1);
      Eigen::MatrixXd plane(2, m_ - start);
      plane.row(0) = a.transpose() * g_.rightCols(m_ - start);
      plane.row(1) = b.transpose() * g_.rightCols(m_ - start);
      add(prod * planar_det_sum(plane));
      return;
    }
    for (int j = start; j <= m_ - (k_ - depth); ++j) {
      Small r = residual(g_.col(j), depth);
      const double rn = r.norm();
      if (!(rn > 1e-14 * norms_[j])) continue;
      basis_[depth] = r / rn;
      rec(j + 1, depth + 1, prod * rn);
    }
  }

  const Eigen::MatrixXd& g_;
  int k_;
  int m_;
  std::vector<Small> basis_;
  Eigen::VectorXd norms_;
  double total_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// |Z| = 2^k sum_{|S|=k} |det G_S|. Zero when the generators do not span.
inline VolumeResult zonotope_volume(const ZonotopeK& z) {
  const int k = static_cast<int>(z.generators.rows());
  const int m = static_cast<int>(z.generators.cols());
  if (k < 1) throw DimensionError("zonotope_volume: k must be >= 1");
  if (detail::binomial(m, k) > kZonotopeBudget) {
    throw BudgetError("zonotope_volume: C(" + std::to_string(m) + "," + std::to_string(k) +
                          ") subsets exceed budget 1e8",
                      k, "exact_zonotope");
  }
  if (m < k) return VolumeResult::exact(0.0, VolumeMethod::exact_zonotope);
  const double scale = std::ldexp(1.0, k);
  if (k == 1) return VolumeResult::exact(scale * z.generators.cwiseAbs().sum(), VolumeMethod::exact_zonotope);
  if (k == 2) return VolumeResult::exact(scale * detail::planar_det_sum(z.generators), VolumeMethod::exact_zonotope);
  detail::SubsetDetSum sum(z.generators);
  return VolumeResult::exact(scale * sum.run(), VolumeMethod::exact_zonotope);
}

/// Exact volume of the convex hull of the columns; k <= 8.
inline VolumeResult hull_volume(const PolytopeK& p) {
  const int k = static_cast<int>(p.vertices.rows());
  if (k > hull::kMaxDim) {
    throw BudgetError("hull_volume: k=" + std::to_string(k) + " exceeds cap 8", k, "exact_hull");
  }
  const Eigen::MatrixXd& v = p.vertices;
  const hull::Hull h = hull::convex_hull(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), k);
  return VolumeResult::exact(h.full_dimensional ? h.volume : 0.0, VolumeMethod::exact_hull);
}

struct SandwichOptions {
  double tol = 1e-3;
  int max_rounds = 12;
  /// Cap on direction pairs; 0 picks a per-k default that keeps one call
  /// within about a second.
  std::size_t max_directions = 0;
};

inline std::size_t default_sandwich_directions(int k) {
  static constexpr std::size_t kCap[] = {0, 1, 1 << 14, 1 << 14, 1200, 160, 52};
  return kCap[std::clamp(k, 0, kSandwichMaxDim)];
}

namespace detail {

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

/// Representatives of 2k^2 + 32 symmetric directions (one of each +-pair).
inline std::vector<Eigen::VectorXd> initial_directions(int k) {
  const int half = k * k + 16;
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(half));
  if (k == 2) {
    for (int j = 0; j < half; ++j) {
      const double a = std::numbers::pi * j / half;
      dirs.emplace_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
    return dirs;
  }
  for (int i = 0; i < k; ++i) dirs.push_back(Eigen::VectorXd::Unit(k, i));
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13};
  for (std::uint64_t idx = 1; static_cast<int>(dirs.size()) < half; ++idx) {
    Eigen::VectorXd g(k);
    for (int c = 0; c < k; c += 2) {
      const double u1 = radical_inverse(idx, kPrimes[c]);
      const double u2 = radical_inverse(idx, kPrimes[c + 1]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      g[c] = r * std::cos(2.0 * std::numbers::pi * u2);
      if (c + 1 < k) g[c + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    const double gn = g.norm();
    if (gn > 0.0) dirs.push_back(g / gn);
  }
  return dirs;
}

/// Quantized key of the line through u, used to skip repeated directions.
inline std::string direction_key(const Eigen::VectorXd& u) {
  Eigen::Index lead = 0;
  while (lead < u.size() && std::abs(u[lead]) < 1e-12) ++lead;
  const double s = (lead < u.size() && u[lead] < 0.0) ? -1.0 : 1.0;
  std::string key;
  key.reserve(static_cast<std::size_t>(u.size()) * 8);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto q = static_cast<std::int64_t>(std::llround(s * u[i] * 1e10));
    key.append(reinterpret_cast<const char*>(&q), sizeof q);
  }
  return key;
}

inline hull::Hull symmetric_hull(const std::vector<Eigen::VectorXd>& pts, int k) {
  std::vector<double> coords;
  coords.reserve(pts.size() * 2 * static_cast<std::size_t>(k));
  for (const auto& p : pts) coords.insert(coords.end(), p.data(), p.data() + k);
  for (const auto& p : pts) {
    for (int i = 0; i < k; ++i) coords.push_back(-p[i]);
  }
  return hull::convex_hull(coords, k, true);
}

/// Volume of the polar Q° of a full-dimensional hull Q with the origin in
/// its interior, without building Q° itself.
///
/// Every face G of Q maps to the centroid of the polar vertices n_f/b_f over
/// the facets f containing G, a point of the dual face G*. Each flag
/// {v} = G_0 < G_1 < ... < G_{k-1} = f of Q then spans, with the origin,
/// one simplex of a barycentric triangulation of Q°.
inline double polar_volume(const hull::Hull& q, int k) {
  if (!q.full_dimensional) return kInf;
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
      std::uint64_t h = 0x9E3779B97F4A7C15ULL;
      for (int x : v) h = mix64(h ^ static_cast<std::uint64_t>(x));
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<std::vector<int>, std::pair<Eigen::VectorXd, int>, KeyHash> centroid;
  std::vector<Eigen::VectorXd> apex(q.facets.size());
  std::vector<std::vector<int>> verts(q.facets.size());
  const unsigned full = (1u << k) - 1u;
  std::vector<int> key;
  for (std::size_t fi = 0; fi < q.facets.size(); ++fi) {
    const auto& f = q.facets[fi];
    apex[fi] = Eigen::Map<const Eigen::VectorXd>(f.normal.data(), k) / f.offset;
    verts[fi] = f.vertices;
    std::sort(verts[fi].begin(), verts[fi].end());
    for (unsigned mask = 1; mask < full; ++mask) {
      key.clear();
      for (int i = 0; i < k; ++i) {
        if (mask & (1u << i)) key.push_back(verts[fi][i]);
      }
      auto [it, fresh] = centroid.try_emplace(key, Eigen::VectorXd::Zero(k), 0);
      it->second.first += apex[fi];
      it->second.second += 1;
    }
  }
  for (auto& [kk, c] : centroid) c.first /= c.second;

  double total = 0.0;
  using Small = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, hull::kMaxDim, 1>;
  std::vector<Small> basis(static_cast<std::size_t>(k));
  std::vector<Small> point(static_cast<std::size_t>(full) + 1);
  const std::function<void(unsigned, int, double)> rec = [&](unsigned mask, int depth, double prod) {
    if (depth == k) {
      total += prod;
      return;
    }
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) continue;
      const unsigned next = mask | (1u << i);
      Small r = point[next];
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < depth; ++j) r -= basis[j].dot(r) * basis[j];
      }
      const double rn = r.norm();
      if (!(rn > 0.0)) continue;
      basis[depth] = r / rn;
      rec(next, depth + 1, prod * rn);
    }
  };
  for (std::size_t fi = 0; fi < q.facets.size(); ++fi) {
    for (unsigned mask = 1; mask < full; ++mask) {
      key.clear();
      for (int j = 0; j < k; ++j) {
        if (mask & (1u << j)) key.push_back(verts[fi][j]);
      }
      point[mask] = centroid.at(key).first;
    }
    point[full] = apex[fi];
    // Depth-first over vertex orderings; |det| is the product of residual norms.
    rec(0u, 0, 1.0);
  }
  return total / std::tgamma(k + 1.0);
}

}  // namespace detail

/// Volume bracket from support and contact oracles, k <= 6.
///
/// Inner body: hull of contact points x(u) over a symmetric direction set.
/// Outer body: the intersection of {y : <y,u> <= h(u)}, obtained as the
/// polar of the hull of the points u/h(u). Inner facet normals and outer
/// vertex directions with the largest gaps are added until
/// (upper - lower) <= tol * lower or the round cap is hit. The value is the
/// geometric mean of the bracket. Ellipsoidal oracles return their exact
/// volume as a degenerate bracket.
inline VolumeResult sandwich_volume(const ProjectedBody& pb, const SandwichOptions& opt = {}) {
  const int k = pb.k;
  if (k < 1) throw DimensionError("sandwich_volume: k must be >= 1");
  if (const auto* o = std::get_if<OracleK>(&pb.rep); o && o->gram) {
    const double det = std::max(0.0, o->gram->determinant());
    const double v = std::exp(log_unit_ball_volume(k)) * std::sqrt(det);
    return {v, v, v, VolumeMethod::sandwich, 0, true};
  }
  if (k > kSandwichMaxDim) {
    throw BudgetError("sandwich_volume: k=" + std::to_string(k) + " exceeds cap 6", k, "sandwich");
  }
  if (k == 1) {
    const double v = 2.0 * support(pb, Eigen::VectorXd::Ones(1));
    return {v, v, v, VolumeMethod::sandwich, 0, true};
  }

  std::vector<Eigen::VectorXd> dirs = detail::initial_directions(k);
  std::unordered_set<std::string> seen;
  for (const auto& d : dirs) seen.insert(detail::direction_key(d));

  VolumeResult out{0.0, 0.0, 0.0, VolumeMethod::sandwich, 0, false};
  for (int round = 0;; ++round) {
    std::vector<Eigen::VectorXd> contacts;
    std::vector<Eigen::VectorXd> dual;
    contacts.reserve(dirs.size());
    dual.reserve(dirs.size());
    for (const auto& u : dirs) {
      contacts.push_back(support_gradient(pb, u));
      dual.push_back(u / support(pb, u));
    }
    const hull::Hull inner = detail::symmetric_hull(contacts, k);
    const hull::Hull polar = detail::symmetric_hull(dual, k);
    std::vector<Eigen::VectorXd> outer_vertices;
    outer_vertices.reserve(polar.facets.size());
    for (const auto& f : polar.facets) {
      outer_vertices.push_back(Eigen::Map<const Eigen::VectorXd>(f.normal.data(), k) / f.offset);
    }
    const double outer_volume = detail::polar_volume(polar, k);
    const double lo = inner.full_dimensional ? inner.volume : 0.0;
    const double hi = std::max(outer_volume, lo);
    out.lower = lo;
    out.upper = hi;
    out.value = std::sqrt(lo * hi);
    out.refinement_steps = round;
    if (hi - lo <= opt.tol * lo) {
      out.converged = true;
      return out;
    }
    if (round >= opt.max_rounds) return out;

    std::vector<std::pair<double, Eigen::VectorXd>> cand;
    cand.reserve(inner.facets.size() + outer_vertices.size());
    // An inner facet touching the body (a true facet of a polytope) is
    // scored by the outer body's support along its normal instead, since
    // that normal may still be missing from the direction set.
    for (const auto& f : inner.facets) {
      Eigen::VectorXd nu = Eigen::Map<const Eigen::VectorXd>(f.normal.data(), k);
      double gap = support(pb, nu) / f.offset - 1.0;
      if (gap <= 1e-12) {
        double h_outer = 0.0;
        for (const auto& w : outer_vertices) h_outer = std::max(h_outer, w.dot(nu));
        gap = h_outer / f.offset - 1.0;
      }
      cand.emplace_back(gap, std::move(nu));
    }
    for (const auto& w : outer_vertices) {
      const double wn = w.norm();
      Eigen::VectorXd dir = w / wn;
      const double gap = wn / support(pb, dir) - 1.0;
      cand.emplace_back(gap, std::move(dir));
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t cap = opt.max_directions > 0 ? opt.max_directions : default_sandwich_directions(k);
    if (dirs.size() >= cap) return out;
    const std::size_t limit = std::min(dirs.size(), cap - dirs.size());
    std::size_t added = 0;
    for (auto& [gap, dir] : cand) {
      if (added >= limit || !(gap > 1e-13)) break;
      if (seen.insert(detail::direction_key(dir)).second) {
        dirs.push_back(std::move(dir));
        ++added;
      }
    }
    if (added == 0) return out;
  }
}

struct ProjectionVolumeOptions {
  SandwichOptions sandwich;
};

/// Dispatch: zonotope determinant sum, then vertex hull, then sandwich.
/// A zonotope over the subset budget falls back to the sandwich bracket.
inline VolumeResult projection_volume(const ProjectedBody& pb, const ProjectionVolumeOptions& opt = {}) {
  if (const auto* z = std::get_if<ZonotopeK>(&pb.rep)) {
    try {
      return zonotope_volume(*z);
    } catch (const BudgetError&) {
      return sandwich_volume(pb, opt.sandwich);
    }
  }
  if (const auto* p = std::get_if<PolytopeK>(&pb.rep)) return hull_volume(*p);
  return sandwich_volume(pb, opt.sandwich);
}

inline double vrad(double volume, int k) {
  if (k < 1) throw DimensionError("vrad: k must be >= 1");
  if (!(volume >= 0.0)) throw PreconditionError("vrad: negative volume");
  if (volume == 0.0) return 0.0;
  return std::exp((std::log(volume) - log_unit_ball_volume(k)) / k);
}

inline double vrad(const VolumeResult& v, int k) { return vrad(v.value, k); }

/// w(P_E A): exact for zonotopes (E|theta_1| times the sum of generator
/// lengths) and at k = 1, otherwise a spherical mean over N directions of
/// `stream`. Passing one stream for every subspace gives common random numbers.
inline Estimate proj_mean_width(const ProjectedBody& pb, std::int64_t count, const SeedStream& stream) {
  const int k = pb.k;
  if (k < 1) throw DimensionError("proj_mean_width: k must be >= 1");
  if (k == 1) return Estimate::exact(support(pb, Eigen::VectorXd::Ones(1)), count);
  if (const auto* z = std::get_if<ZonotopeK>(&pb.rep)) {
    return Estimate::exact(sphere_abs_coordinate_mean(k) * z->generators.colwise().norm().sum(), count);
  }
  if (const auto* o = std::get_if<OracleK>(&pb.rep); o && o->gram) {
    const Eigen::MatrixXd& g = *o->gram;
    if ((g - g(0, 0) * Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-12 * g(0, 0)) {
      return Estimate::exact(std::sqrt(g(0, 0)), count);
    }
  }
  if (count < 2) throw PreconditionError("proj_mean_width: need N >= 2");
  SeedStream s = stream;
  std::vector<double> h(static_cast<std::size_t>(count));
  for (auto& v : h) v = support(pb, sample_sphere(s, k));
  return detail::sample_mean(h);
}

namespace detail {

inline Eigen::VectorXd hyperplane_normal(const Eigen::MatrixXd& cols) {
  const int k = static_cast<int>(cols.rows());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.col(k - 1);
}

inline void zonotope_facet_normals(const Eigen::MatrixXd& g, int start, std::vector<int>& chosen,
                                   const std::function<void(const Eigen::VectorXd&)>& visit) {
  const int k = static_cast<int>(g.rows());
  const int m = static_cast<int>(g.cols());
  if (static_cast<int>(chosen.size()) == k - 1) {
    Eigen::MatrixXd cols(k, k - 1);
    for (int i = 0; i < k - 1; ++i) cols.col(i) = g.col(chosen[i]);
    if (matrix_rank(cols) == k - 1) visit(hyperplane_normal(cols));
    return;
  }
  for (int j = start; j < m; ++j) {
    chosen.push_back(j);
    zonotope_facet_normals(g, j + 1, chosen, visit);
    chosen.pop_back();
  }
}

}  // namespace detail

/// r(P_E A), k <= 4. Exact for zonotopes (minimum of h over the normals of
/// (k-1)-subsets of generators), V-polytopes (nearest hull facet), and
/// ellipsoids; otherwise the minimum over `grid` low-discrepancy directions
/// refined locally, flagged as an upper bound.
inline Radius proj_inradius(const ProjectedBody& pb, int grid = 4096) {
  const int k = pb.k;
  if (k > kInradiusMaxDim) {
    throw BudgetError("proj_inradius: k=" + std::to_string(k) + " exceeds cap 4", k, "inradius_grid");
  }
  if (k < 1) throw DimensionError("proj_inradius: k must be >= 1");
  if (k == 1) return {support(pb, Eigen::VectorXd::Ones(1)), true};
  if (const auto* z = std::get_if<ZonotopeK>(&pb.rep)) {
    if (detail::matrix_rank(z->generators) < k) return {0.0, true};
    double best = kInf;
    std::vector<int> chosen;
    detail::zonotope_facet_normals(z->generators, 0, chosen, [&](const Eigen::VectorXd& nu) {
      best = std::min(best, (z->generators.transpose() * nu).cwiseAbs().sum());
    });
    return {best, true};
  }
  if (const auto* p = std::get_if<PolytopeK>(&pb.rep)) {
    const Eigen::MatrixXd& v = p->vertices;
    const hull::Hull h =
        hull::convex_hull(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), k, true);
    if (!h.full_dimensional) return {0.0, true};
    double best = kInf;
    for (const auto& f : h.facets) best = std::min(best, f.offset);
    return {best, true};
  }
  const auto& o = std::get<OracleK>(pb.rep);
  if (o.gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*o.gram, Eigen::EigenvaluesOnly);
    return {std::sqrt(std::max(0.0, es.eigenvalues()[0])), true};
  }
  auto h = [&](const Eigen::VectorXd& u) { return support(pb, u); };
  std::vector<std::pair<double, Eigen::VectorXd>> cands;
  const int count = std::max(grid, 2 * k);
  if (k == 2) {
    for (int j = 0; j < count; ++j) {
      const double a = std::numbers::pi * j / count;
      Eigen::VectorXd u = Eigen::Vector2d(std::cos(a), std::sin(a));
      cands.emplace_back(h(u), std::move(u));
    }
  } else {
    std::vector<Eigen::VectorXd> dirs = detail::initial_directions(k);
    static constexpr unsigned kPrimes[] = {2, 3, 5, 7};
    for (std::uint64_t idx = 1; static_cast<int>(dirs.size()) < count; ++idx) {
      Eigen::VectorXd g(k);
      for (int c = 0; c < k; c += 2) {
        const double r = std::sqrt(-2.0 * std::log(detail::radical_inverse(idx + 7919, kPrimes[c])));
        const double a = 2.0 * std::numbers::pi * detail::radical_inverse(idx + 7919, kPrimes[c + 1]);
        g[c] = r * std::cos(a);
        if (c + 1 < k) g[c + 1] = r * std::sin(a);
      }
      dirs.push_back(g.normalized());
    }
    for (auto& u : dirs) {
      const double v = h(u);
      cands.emplace_back(v, std::move(u));
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SeedStream stream = derive_stream(detail::kRadiusSeed, {3});
  double best = cands.front().first;
  for (int i = 0; i < 8 && i < static_cast<int>(cands.size()); ++i) {
    best = std::min(best, detail::refine_min_on_sphere(h, cands[i].second, cands[i].first, stream, k == 2 ? 2.0 * std::numbers::pi / count : 0.05));
  }
  return {best, false};
}

}  // namespace kubota
