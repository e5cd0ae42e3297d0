#pragma once

// Symmetric convex bodies given by structure, with exact support functions,
// closed-form gauges where they exist, contact points, and radii.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kubota/errors.hpp"
#include "kubota/linrand.hpp"

namespace kubota {

using VecRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// [-halfwidth, halfwidth]^n
struct Cube {
  int n;
  double halfwidth;
};

/// radius * B_p^n, p in [1, inf]. p = inf behaves exactly like a cube.
struct LpBall {
  int n;
  double p;
  double radius = 1.0;
};

struct Ellipsoid {
  Eigen::VectorXd semiaxes;
};

/// Sum of the segments [-g_i, g_i]; generators are the columns.
struct Zonotope {
  Eigen::MatrixXd generators;
};

/// h(u) = (sum_i w_i |<u, theta_i>|^q)^(1/q) for unit atoms theta_i (columns).
struct LqZonoid {
  double q;
  Eigen::MatrixXd atoms;
  Eigen::VectorXd weights;
};

/// Convex hull of the columns; the set is closed under negation.
struct PolytopeV {
  Eigen::MatrixXd vertices;
};

/// An immutable origin-symmetric convex body with nonempty interior.
/// Construct through the factories, which validate the structure.
class Body {
 public:
  using Variant = std::variant<Cube, LpBall, Ellipsoid, Zonotope, LqZonoid, PolytopeV>;

  static Body cube(int n, double halfwidth = 1.0);
  static Body lp_ball(int n, double p, double radius = 1.0);
  static Body ellipsoid(Eigen::VectorXd semiaxes);
  static Body zonotope(Eigen::MatrixXd generators);
  static Body lq_zonoid(double q, Eigen::MatrixXd atoms, Eigen::VectorXd weights);
  /// Adds -v for every vertex v whose negation is missing.
  static Body polytope_v(Eigen::MatrixXd vertices);

  int dim() const noexcept { return n_; }
  const Variant& variant() const noexcept { return v_; }
  std::string kind() const;

  /// The body t*A for t > 0.
  Body scaled(double t) const;

  /// Euclidean ball of some radius (LpBall with p = 2, or an ellipsoid with equal axes).
  bool is_euclidean_ball() const;

  std::string label;

 private:
  Body(int n, Variant v) : n_(n), v_(std::move(v)) {}

  int n_;
  Variant v_;
};

namespace detail {

inline double dual_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// l_r norm with scaling, r in [1, inf].
inline double lp_norm(VecRef u, double r) {
  if (r == 1.0) return u.cwiseAbs().sum();
  if (std::isinf(r)) return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  if (r == 2.0) return u.norm();
  const double m = u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]) / m, r);
  return m * std::pow(s, 1.0 / r);
}

/// (sum_i w_i |s_i|^q)^(1/q) with scaling.
inline double weighted_q_mean(const Eigen::VectorXd& s, const Eigen::VectorXd& w, double q) {
  if (q == 1.0) return w.dot(s.cwiseAbs());
  if (q == 2.0) return std::sqrt(w.dot(s.cwiseAbs2()));
  const double m = s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += w[i] * std::pow(std::abs(s[i]) / m, q);
  return m * std::pow(acc, 1.0 / q);
}

inline double sign_or_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

inline void require_dim(const Body& body, Eigen::Index len, const char* where) {
  if (len != body.dim()) {
    throw DimensionError(std::string(where) + ": expected length " + std::to_string(body.dim()) +
                         ", got " + std::to_string(len));
  }
}

inline int matrix_rank(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace detail

inline Body Body::cube(int n, double halfwidth) {
  if (n < 1) throw ValidationError("cube: n must be >= 1");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw ValidationError("cube: halfwidth must be positive and finite");
  }
  return Body(n, Cube{n, halfwidth});
}

inline Body Body::lp_ball(int n, double p, double radius) {
  if (n < 1) throw ValidationError("lp_ball: n must be >= 1");
  if (!(p >= 1.0)) throw ValidationError("lp_ball: p must lie in [1, inf]");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError("lp_ball: radius must be positive and finite");
  }
  return Body(n, LpBall{n, p, radius});
}

inline Body Body::ellipsoid(Eigen::VectorXd semiaxes) {
  if (semiaxes.size() < 1) throw ValidationError("ellipsoid: need at least one semiaxis");
  for (Eigen::Index i = 0; i < semiaxes.size(); ++i) {
    if (!(semiaxes[i] > 0.0) || !std::isfinite(semiaxes[i])) {
      throw ValidationError("ellipsoid: semiaxes must be positive and finite");
    }
  }
  const int n = static_cast<int>(semiaxes.size());
  return Body(n, Ellipsoid{std::move(semiaxes)});
}

inline Body Body::zonotope(Eigen::MatrixXd generators) {
  const int n = static_cast<int>(generators.rows());
  if (n < 1) throw ValidationError("zonotope: empty generator list");
  if (!generators.allFinite()) throw ValidationError("zonotope: non-finite generator entry");
  if (detail::matrix_rank(generators) < n) {
    throw ValidationError("zonotope: generators do not span R^" + std::to_string(n));
  }
  return Body(n, Zonotope{std::move(generators)});
}

inline Body Body::lq_zonoid(double q, Eigen::MatrixXd atoms, Eigen::VectorXd weights) {
  if (!(q >= 1.0) || std::isinf(q)) throw ValidationError("lq_zonoid: q must lie in [1, inf)");
  const int n = static_cast<int>(atoms.rows());
  if (n < 1 || atoms.cols() < 1) throw ValidationError("lq_zonoid: empty atom list");
  if (weights.size() != atoms.cols()) {
    throw ValidationError("lq_zonoid: one weight per atom required");
  }
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    if (std::abs(atoms.col(j).norm() - 1.0) > 1e-12) {
      throw ValidationError("lq_zonoid: atom " + std::to_string(j) + " is not a unit vector");
    }
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw ValidationError("lq_zonoid: weights must be positive and finite");
    }
  }
  if (detail::matrix_rank(atoms) < n) {
    throw ValidationError("lq_zonoid: atoms do not span R^" + std::to_string(n));
  }
  return Body(n, LqZonoid{q, std::move(atoms), std::move(weights)});
}

inline Body Body::polytope_v(Eigen::MatrixXd vertices) {
  const int n = static_cast<int>(vertices.rows());
  if (n < 1 || vertices.cols() < 1) throw ValidationError("polytope_v: empty vertex list");
  if (!vertices.allFinite()) throw ValidationError("polytope_v: non-finite vertex entry");
  std::vector<Eigen::VectorXd> cols;
  for (Eigen::Index j = 0; j < vertices.cols(); ++j) cols.emplace_back(vertices.col(j));
  const std::size_t original = cols.size();
  for (std::size_t j = 0; j < original; ++j) {
    const Eigen::VectorXd neg = -cols[j];
    const double tol = 1e-12 * std::max(1.0, neg.cwiseAbs().maxCoeff());
    const bool present = std::any_of(cols.begin(), cols.end(), [&](const Eigen::VectorXd& c) {
      return (c - neg).cwiseAbs().maxCoeff() <= tol;
    });
    if (!present) cols.push_back(neg);
  }
  Eigen::MatrixXd sym(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sym.col(static_cast<Eigen::Index>(j)) = cols[j];
  if (detail::matrix_rank(sym) < n) {
    throw ValidationError("polytope_v: vertices do not span R^" + std::to_string(n));
  }
  return Body(n, PolytopeV{std::move(sym)});
}

inline std::string Body::kind() const {
  struct Visitor {
    std::string operator()(const Cube&) const { return "cube"; }
    std::string operator()(const LpBall&) const { return "lp_ball"; }
    std::string operator()(const Ellipsoid&) const { return "ellipsoid"; }
    std::string operator()(const Zonotope&) const { return "zonotope"; }
    std::string operator()(const LqZonoid&) const { return "lq_zonoid"; }
    std::string operator()(const PolytopeV&) const { return "polytope_v"; }
  };
  return std::visit(Visitor{}, v_);
}

inline Body Body::scaled(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("scaled: factor must be positive");
  struct Visitor {
    double t;
    Body operator()(const Cube& c) const { return Body::cube(c.n, c.halfwidth * t); }
    Body operator()(const LpBall& b) const { return Body::lp_ball(b.n, b.p, b.radius * t); }
    Body operator()(const Ellipsoid& e) const { return Body::ellipsoid(e.semiaxes * t); }
    Body operator()(const Zonotope& z) const { return Body::zonotope(z.generators * t); }
    Body operator()(const LqZonoid& z) const {
      return Body::lq_zonoid(z.q, z.atoms, z.weights * std::pow(t, z.q));
    }
    Body operator()(const PolytopeV& p) const { return Body::polytope_v(p.vertices * t); }
  };
  Body out = std::visit(Visitor{t}, v_);
  out.label = label;
  return out;
}

inline bool Body::is_euclidean_ball() const {
  if (const auto* b = std::get_if<LpBall>(&v_)) return b->p == 2.0;
  if (const auto* e = std::get_if<Ellipsoid>(&v_)) {
    return e->semiaxes.maxCoeff() == e->semiaxes.minCoeff();
  }
  return false;
}

/// h_A(u) = sup_{x in A} <x, u>.
inline double support(const Body& body, VecRef u) {
  detail::require_dim(body, u.size(), "support");
  struct Visitor {
    VecRef u;
    double operator()(const Cube& c) const { return c.halfwidth * u.cwiseAbs().sum(); }
    double operator()(const LpBall& b) const {
      return b.radius * detail::lp_norm(u, detail::dual_exponent(b.p));
    }
    double operator()(const Ellipsoid& e) const {
      return std::sqrt(e.semiaxes.cwiseProduct(u).squaredNorm());
    }
    double operator()(const Zonotope& z) const {
      return (z.generators.transpose() * u).cwiseAbs().sum();
    }
    double operator()(const LqZonoid& z) const {
      const Eigen::VectorXd s = z.atoms.transpose() * u;
      return detail::weighted_q_mean(s, z.weights, z.q);
    }
    double operator()(const PolytopeV& p) const {
      return (p.vertices.transpose() * u).maxCoeff();
    }
  };
  return std::visit(Visitor{u}, body.variant());
}

/// Minkowski functional ||x||_A; only Cube, LpBall and Ellipsoid have one here.
inline double gauge(const Body& body, VecRef x) {
  detail::require_dim(body, x.size(), "gauge");
  struct Visitor {
    VecRef x;
    double operator()(const Cube& c) const { return x.cwiseAbs().maxCoeff() / c.halfwidth; }
    double operator()(const LpBall& b) const { return detail::lp_norm(x, b.p) / b.radius; }
    double operator()(const Ellipsoid& e) const {
      return std::sqrt(x.cwiseQuotient(e.semiaxes).squaredNorm());
    }
    double operator()(const Zonotope&) const {
      throw UnsupportedGauge("gauge: zonotope has no closed-form gauge");
    }
    double operator()(const LqZonoid&) const {
      throw UnsupportedGauge("gauge: lq_zonoid has no closed-form gauge");
    }
    double operator()(const PolytopeV&) const {
      throw UnsupportedGauge("gauge: polytope_v has no closed-form gauge");
    }
  };
  return std::visit(Visitor{x}, body.variant());
}

inline bool has_gauge(const Body& body) {
  return std::holds_alternative<Cube>(body.variant()) ||
         std::holds_alternative<LpBall>(body.variant()) ||
         std::holds_alternative<Ellipsoid>(body.variant());
}

/// A maximizer x in A of <x, u>. Smooth variants return the gradient of h at
/// u; polyhedral ones the lowest-index maximizing vertex (zero inner products
/// take the + sign).
inline Eigen::VectorXd support_gradient(const Body& body, VecRef u) {
  detail::require_dim(body, u.size(), "support_gradient");
  if (u.cwiseAbs().maxCoeff() == 0.0) throw PreconditionError("support_gradient: u = 0");
  struct Visitor {
    VecRef u;
    Eigen::VectorXd cube(double hw) const {
      Eigen::VectorXd x(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) x[i] = hw * detail::sign_or_plus(u[i]);
      return x;
    }
    Eigen::VectorXd operator()(const Cube& c) const { return cube(c.halfwidth); }
    Eigen::VectorXd operator()(const LpBall& b) const {
      const double r = detail::dual_exponent(b.p);
      if (r == 1.0) return cube(b.radius);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(u.size());
      if (std::isinf(r)) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < u.size(); ++i) {
          if (std::abs(u[i]) > std::abs(u[best])) best = i;
        }
        x[best] = b.radius * detail::sign_or_plus(u[best]);
        return x;
      }
      const double h = detail::lp_norm(u, r);
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        x[i] = b.radius * detail::sign_or_plus(u[i]) * std::pow(std::abs(u[i]) / h, r - 1.0);
      }
      return x;
    }
    Eigen::VectorXd operator()(const Ellipsoid& e) const {
      const Eigen::VectorXd a2 = e.semiaxes.cwiseAbs2();
      const double h = std::sqrt(a2.dot(u.cwiseAbs2()));
      return a2.cwiseProduct(u) / h;
    }
    Eigen::VectorXd operator()(const Zonotope& z) const {
      const Eigen::VectorXd s = z.generators.transpose() * u;
      Eigen::VectorXd signs(s.size());
      for (Eigen::Index i = 0; i < s.size(); ++i) signs[i] = detail::sign_or_plus(s[i]);
      return z.generators * signs;
    }
    Eigen::VectorXd operator()(const LqZonoid& z) const {
      const Eigen::VectorXd s = z.atoms.transpose() * u;
      Eigen::VectorXd c(s.size());
      if (z.q == 1.0) {
        for (Eigen::Index i = 0; i < s.size(); ++i) c[i] = z.weights[i] * detail::sign_or_plus(s[i]);
      } else {
        const double h = detail::weighted_q_mean(s, z.weights, z.q);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          c[i] = z.weights[i] * detail::sign_or_plus(s[i]) * std::pow(std::abs(s[i]) / h, z.q - 1.0);
        }
      }
      return z.atoms * c;
    }
    Eigen::VectorXd operator()(const PolytopeV& p) const {
      const Eigen::VectorXd s = p.vertices.transpose() * u;
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < s.size(); ++j) {
        if (s[j] > s[best]) best = j;
      }
      return p.vertices.col(best);
    }
  };
  return std::visit(Visitor{u}, body.variant());
}

/// A radius together with whether it is exact or only a one-sided bound.
struct Radius {
  double value;
  bool exact;
};

namespace detail {

inline constexpr std::uint64_t kRadiusSeed = 0x52414449555350ULL;

/// Local minimization of f on the unit sphere by pattern search along
/// random tangent directions with geometric step shrinking. Returns the
/// best value seen, so the result is an upper bound of the true minimum.
inline double refine_min_on_sphere(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd u, double fu, SeedStream& stream,
                                   double step = 0.05, double min_step = 1e-10) {
  const int n = static_cast<int>(u.size());
  if (n == 1) return fu;
  int failures = 0;
  while (step > min_step) {
    Eigen::VectorXd t = sample_gaussian(stream, n);
    t -= t.dot(u) * u;
    const double tn = t.norm();
    if (tn == 0.0) continue;
    t /= tn;
    bool improved = false;
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd cand = (u + sgn * step * t).normalized();
      const double fc = f(cand);
      if (fc < fu) {
        u = std::move(cand);
        fu = fc;
        improved = true;
        break;
      }
    }
    if (improved) {
      failures = 0;
    } else if (++failures >= 2 * n) {
      step *= 0.5;
      failures = 0;
    }
  }
  return fu;
}

inline double sampled_min_support(const Body& body) {
  const int n = body.dim();
  SeedStream stream = derive_stream(kRadiusSeed, {1});
  auto h = [&](const Eigen::VectorXd& u) { return support(body, u); };
  constexpr int kSamples = 4096;
  constexpr int kRefine = 8;
  std::vector<std::pair<double, Eigen::VectorXd>> cands;
  cands.reserve(kSamples + 2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    cands.emplace_back(h(e), e);
  }
  for (int i = 0; i < kSamples; ++i) {
    Eigen::VectorXd u = sample_sphere(stream, n);
    cands.emplace_back(h(u), std::move(u));
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = cands.front().first;
  for (int i = 0; i < kRefine && i < static_cast<int>(cands.size()); ++i) {
    best = std::min(best, refine_min_on_sphere(h, cands[i].second, cands[i].first, stream));
  }
  return best;
}

/// Maximum of h on the sphere by multi-start fixed-point ascent
/// u <- grad h(u) / |grad h(u)|, which never decreases h for convex h.
inline double multistart_max_support(const Body& body) {
  const int n = body.dim();
  SeedStream stream = derive_stream(kRadiusSeed, {2});
  constexpr int kStarts = 64;
  constexpr int kIters = 200;
  double best = 0.0;
  for (int s = 0; s < kStarts; ++s) {
    Eigen::VectorXd u = sample_sphere(stream, n);
    double hu = support(body, u);
    for (int it = 0; it < kIters; ++it) {
      const Eigen::VectorXd g = support_gradient(body, u);
      const double gn = g.norm();
      if (gn == 0.0) break;
      Eigen::VectorXd next = g / gn;
      const double hn = support(body, next);
      if (!(hn > hu * (1.0 + 1e-15))) {
        hu = std::max(hu, hn);
        break;
      }
      u = std::move(next);
      hu = hn;
    }
    best = std::max(best, hu);
  }
  return best;
}

}  // namespace detail

/// R(A) = max over the sphere of h_A.
inline Radius circumradius(const Body& body) {
  struct Visitor {
    const Body& body;
    Radius operator()(const Cube& c) const {
      return {c.halfwidth * std::sqrt(static_cast<double>(c.n)), true};
    }
    Radius operator()(const LpBall& b) const {
      const double r = detail::dual_exponent(b.p);
      if (r >= 2.0) return {b.radius, true};
      return {b.radius * std::pow(static_cast<double>(b.n), 1.0 / r - 0.5), true};
    }
    Radius operator()(const Ellipsoid& e) const { return {e.semiaxes.maxCoeff(), true}; }
    Radius operator()(const Zonotope&) const { return {detail::multistart_max_support(body), false}; }
    Radius operator()(const LqZonoid&) const { return {detail::multistart_max_support(body), false}; }
    Radius operator()(const PolytopeV& p) const { return {p.vertices.colwise().norm().maxCoeff(), true}; }
  };
  return std::visit(Visitor{body}, body.variant());
}

/// r(A) = min over the sphere of h_A.
inline Radius inradius(const Body& body) {
  struct Visitor {
    const Body& body;
    Radius operator()(const Cube& c) const { return {c.halfwidth, true}; }
    Radius operator()(const LpBall& b) const {
      const double r = detail::dual_exponent(b.p);
      if (r <= 2.0) return {b.radius, true};
      return {b.radius * std::pow(static_cast<double>(b.n), 1.0 / r - 0.5), true};
    }
    Radius operator()(const Ellipsoid& e) const { return {e.semiaxes.minCoeff(), true}; }
    Radius operator()(const Zonotope&) const { return {detail::sampled_min_support(body), false}; }
    Radius operator()(const LqZonoid&) const { return {detail::sampled_min_support(body), false}; }
    Radius operator()(const PolytopeV&) const { return {detail::sampled_min_support(body), false}; }
  };
  return std::visit(Visitor{body}, body.variant());
}

/// d_G(A) = R(A)/r(A); inexact when either radius is.
inline Radius geometric_distance(const Body& body) {
  const Radius big = circumradius(body);
  const Radius small = inradius(body);
  return {big.value / small.value, big.exact && small.exact};
}

struct IsotropyReport {
  double deficit;
  bool is_isotropic;
};

inline constexpr double kIsotropyTolerance = 1e-9;

/// Operator-norm distance of sum_i w_i theta_i theta_i^T from the identity.
/// Atoms are the columns of `atoms`.
inline IsotropyReport check_isotropic(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& weights) {
  if (atoms.cols() == 0) throw ValidationError("check_isotropic: no atoms");
  if (weights.size() != atoms.cols()) throw ValidationError("check_isotropic: weight count mismatch");
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    if (std::abs(atoms.col(j).norm() - 1.0) > 1e-12) {
      throw ValidationError("check_isotropic: atom " + std::to_string(j) + " is not a unit vector");
    }
  }
  const Eigen::MatrixXd cov = atoms * weights.asDiagonal() * atoms.transpose();
  const Eigen::MatrixXd diff = cov - Eigen::MatrixXd::Identity(atoms.rows(), atoms.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
  const double deficit = es.eigenvalues().cwiseAbs().maxCoeff();
  return {deficit, deficit <= kIsotropyTolerance};
}

}  // namespace kubota
