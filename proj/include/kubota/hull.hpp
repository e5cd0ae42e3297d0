#pragma once

// Convex hulls in dimension 1..8 by Quickhull with simplicial facets.
//
// Facets are kept as a triangulated boundary: coplanar input produces
// several coplanar simplices rather than merged faces, which is all the
// volume computation needs. Points within `eps` of a facet plane count as
// inside; eps is relative to the largest coordinate magnitude.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "kubota/errors.hpp"

namespace kubota::hull {

inline constexpr int kMaxDim = 8;

/// One simplicial boundary facet: {x : <normal, x> = offset}, normal outward
/// and of unit length.
struct Facet {
  std::vector<double> normal;
  double offset = 0.0;
  std::vector<int> vertices;
};

struct Hull {
  int dim = 0;
  /// false when the points lie in a proper affine subspace (volume 0).
  bool full_dimensional = false;
  double volume = 0.0;
  std::vector<Facet> facets;
};

namespace detail {

template <int D>
class Quickhull {
 public:
  using Vec = std::array<double, D>;

  explicit Quickhull(std::span<const double> coords) {
    const std::size_t n = coords.size() / D;
    pts_.resize(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < D; ++j) {
        pts_[i][j] = coords[i * D + j];
        scale = std::max(scale, std::abs(pts_[i][j]));
      }
    }
    scale_ = scale;
    eps_ = 1e-12 * std::max(scale, 1e-300) * D;
  }

  bool build() {
    if (pts_.size() < D + 1 || scale_ == 0.0) return false;
    std::array<int, D + 1> simplex{};
    if (!initial_simplex(simplex)) return false;
    center_.fill(0.0);
    for (int i = 0; i <= D; ++i) {
      for (int j = 0; j < D; ++j) center_[j] += pts_[simplex[i]][j] / (D + 1);
    }
    for (int i = 0; i <= D; ++i) {
      FacetRec f;
      int pos = 0;
      for (int j = 0; j <= D; ++j) {
        if (j == i) continue;
        f.v[pos] = simplex[j];
        f.nb[pos] = j;
        ++pos;
      }
      set_plane(f);
      facets_.push_back(std::move(f));
    }
    std::vector<char> in_simplex(pts_.size(), 0);
    for (int s : simplex) in_simplex[s] = 1;
    for (int p = 0; p < static_cast<int>(pts_.size()); ++p) {
      if (in_simplex[p]) continue;
      for (int fi = 0; fi <= D; ++fi) {
        if (assign(fi, p)) break;
      }
    }
    std::vector<int> stack;
    for (int fi = 0; fi <= D; ++fi) {
      if (!facets_[fi].outside.empty()) stack.push_back(fi);
    }
    while (!stack.empty()) {
      const int fi = stack.back();
      stack.pop_back();
      if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
      add_point(fi, stack);
    }
    return true;
  }

  double volume() const {
    double total = 0.0;
    double comp = 0.0;
    double fact = 1.0;
    for (int i = 2; i <= D; ++i) fact *= i;
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      std::array<std::array<double, D>, D> m{};
      for (int r = 0; r < D; ++r) {
        for (int c = 0; c < D; ++c) m[r][c] = pts_[f.v[r]][c] - center_[c];
      }
      const double term = std::abs(det(m)) / fact;
      // Neumaier summation
      const double t = total + term;
      comp += std::abs(total) >= std::abs(term) ? (total - t) + term : (term - t) + total;
      total = t;
    }
    return total + comp;
  }

  void export_facets(std::vector<Facet>& out) const {
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      Facet e;
      e.normal.assign(f.normal.begin(), f.normal.end());
      e.offset = f.offset;
      e.vertices.assign(f.v.begin(), f.v.end());
      out.push_back(std::move(e));
    }
  }

 private:
  struct FacetRec {
    std::array<int, D> v{};
    std::array<int, D> nb{};  // nb[i] shares every vertex except v[i]
    Vec normal{};
    double offset = 0.0;
    std::vector<int> outside;
    int far = -1;
    double far_dist = 0.0;
    std::uint32_t visit = 0;
    bool alive = true;
  };

  static double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int j = 0; j < D; ++j) s += a[j] * b[j];
    return s;
  }

  static double det(std::array<std::array<double, D>, D> m) {
    double d = 1.0;
    for (int c = 0; c < D; ++c) {
      int piv = c;
      for (int r = c + 1; r < D; ++r) {
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      }
      if (m[piv][c] == 0.0) return 0.0;
      if (piv != c) {
        std::swap(m[piv], m[c]);
        d = -d;
      }
      d *= m[c][c];
      for (int r = c + 1; r < D; ++r) {
        const double f = m[r][c] / m[c][c];
        for (int k = c; k < D; ++k) m[r][k] -= f * m[c][k];
      }
    }
    return d;
  }

  double dist(const FacetRec& f, int p) const { return dot(f.normal, pts_[p]) - f.offset; }

  bool assign(int fi, int p) {
    FacetRec& f = facets_[fi];
    const double d = dist(f, p);
    if (d <= eps_) return false;
    f.outside.push_back(p);
    if (d > f.far_dist) {
      f.far_dist = d;
      f.far = p;
    }
    return true;
  }

  // Residual of x against an orthonormal set, twice for stability.
  static void orthogonalize(Vec& x, const std::array<Vec, D>& basis, int count) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int b = 0; b < count; ++b) {
        const double c = dot(x, basis[b]);
        for (int j = 0; j < D; ++j) x[j] -= c * basis[b][j];
      }
    }
  }

  static double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

  bool initial_simplex(std::array<int, D + 1>& simplex) const {
    const int n = static_cast<int>(pts_.size());
    int first = 0;
    for (int p = 1; p < n; ++p) {
      if (pts_[p][0] < pts_[first][0]) first = p;
    }
    simplex[0] = first;
    std::array<Vec, D> basis{};
    for (int level = 0; level < D; ++level) {
      int best = -1;
      double best_r = 0.0;
      Vec best_vec{};
      for (int p = 0; p < n; ++p) {
        Vec x;
        for (int j = 0; j < D; ++j) x[j] = pts_[p][j] - pts_[first][j];
        orthogonalize(x, basis, level);
        const double r = norm(x);
        if (r > best_r) {
          best_r = r;
          best = p;
          best_vec = x;
        }
      }
      if (best < 0 || best_r <= 10.0 * eps_) return false;
      for (int j = 0; j < D; ++j) basis[level][j] = best_vec[j] / best_r;
      simplex[level + 1] = best;
    }
    return true;
  }

  void set_plane(FacetRec& f) const {
    std::array<Vec, D> basis{};
    const Vec& p0 = pts_[f.v[0]];
    int count = 0;
    for (int i = 1; i < D; ++i) {
      Vec x;
      for (int j = 0; j < D; ++j) x[j] = pts_[f.v[i]][j] - p0[j];
      orthogonalize(x, basis, count);
      const double r = norm(x);
      if (r == 0.0) continue;
      for (int j = 0; j < D; ++j) basis[count][j] = x[j] / r;
      ++count;
    }
    Vec nrm;
    for (int j = 0; j < D; ++j) nrm[j] = p0[j] - center_[j];
    orthogonalize(nrm, basis, count);
    const double r = norm(nrm);
    for (int j = 0; j < D; ++j) f.normal[j] = nrm[j] / r;
    f.offset = dot(f.normal, p0);
  }

  void add_point(int start, std::vector<int>& stack) {
    const int p = facets_[start].far;
    const std::uint32_t tag = ++tag_;
    std::vector<int> visible{start};
    facets_[start].visit = tag;
    struct Horizon {
      int facet;
      int slot;
    };
    std::vector<Horizon> horizon;
    for (std::size_t idx = 0; idx < visible.size(); ++idx) {
      const int fi = visible[idx];
      for (int s = 0; s < D; ++s) {
        const int nb = facets_[fi].nb[s];
        if (facets_[nb].visit == tag) continue;
        if (dist(facets_[nb], p) > eps_) {
          facets_[nb].visit = tag;
          visible.push_back(nb);
        } else {
          horizon.push_back({fi, s});
        }
      }
    }

    const int first_new = static_cast<int>(facets_.size());
    for (const auto& h : horizon) {
      FacetRec nf;
      nf.v = facets_[h.facet].v;
      nf.v[h.slot] = p;
      nf.nb.fill(-1);
      const int across = facets_[h.facet].nb[h.slot];
      nf.nb[h.slot] = across;
      const int me = static_cast<int>(facets_.size());
      for (int s = 0; s < D; ++s) {
        if (facets_[across].nb[s] == h.facet) {
          facets_[across].nb[s] = me;
          break;
        }
      }
      set_plane(nf);
      facets_.push_back(std::move(nf));
    }

    // Link new facets to each other across ridges that contain p.
    struct RidgeKey {
      std::array<int, D> key;
      int facet;
      int slot;
    };
    std::vector<RidgeKey> ridges;
    for (int fi = first_new; fi < static_cast<int>(facets_.size()); ++fi) {
      for (int s = 0; s < D; ++s) {
        if (facets_[fi].nb[s] != -1) continue;
        RidgeKey rk;
        rk.key = facets_[fi].v;
        rk.key[s] = -1;
        std::sort(rk.key.begin(), rk.key.end());
        rk.facet = fi;
        rk.slot = s;
        ridges.push_back(rk);
      }
    }
    std::sort(ridges.begin(), ridges.end(),
              [](const RidgeKey& a, const RidgeKey& b) { return a.key < b.key; });
    for (std::size_t i = 0; i + 1 < ridges.size(); i += 2) {
      if (ridges[i].key != ridges[i + 1].key) {
        throw Error("convex_hull: inconsistent horizon (numerically degenerate input)");
      }
      facets_[ridges[i].facet].nb[ridges[i].slot] = ridges[i + 1].facet;
      facets_[ridges[i + 1].facet].nb[ridges[i + 1].slot] = ridges[i].facet;
    }
    if (ridges.size() % 2 != 0) {
      throw Error("convex_hull: unmatched ridge (numerically degenerate input)");
    }

    for (int fi : visible) {
      FacetRec& f = facets_[fi];
      f.alive = false;
      for (int q : f.outside) {
        if (q == p) continue;
        for (int nf = first_new; nf < static_cast<int>(facets_.size()); ++nf) {
          if (assign(nf, q)) break;
        }
      }
      f.outside.clear();
      f.outside.shrink_to_fit();
    }
    for (int nf = first_new; nf < static_cast<int>(facets_.size()); ++nf) {
      if (!facets_[nf].outside.empty()) stack.push_back(nf);
    }
  }

  std::vector<Vec> pts_;
  std::vector<FacetRec> facets_;
  Vec center_{};
  double scale_ = 0.0;
  double eps_ = 0.0;
  std::uint32_t tag_ = 0;
};

template <int D>
Hull run(std::span<const double> coords, bool want_facets) {
  Hull out;
  out.dim = D;
  Quickhull<D> qh(coords);
  if (!qh.build()) return out;
  out.full_dimensional = true;
  out.volume = qh.volume();
  if (want_facets) qh.export_facets(out.facets);
  return out;
}

}  // namespace detail

/// Hull of the points stored row-wise in `coords` (stride `dim`).
inline Hull convex_hull(std::span<const double> coords, int dim, bool want_facets = false) {
  if (dim < 1 || dim > kMaxDim) {
    throw BudgetError("convex_hull: dimension " + std::to_string(dim) + " exceeds cap 8", dim,
                      "exact_hull");
  }
  if (coords.size() % static_cast<std::size_t>(dim) != 0) {
    throw DimensionError("convex_hull: coordinate count not a multiple of dim");
  }
  if (dim == 1) {
    Hull out;
    out.dim = 1;
    if (coords.empty()) return out;
    int lo = 0;
    int hi = 0;
    for (int i = 1; i < static_cast<int>(coords.size()); ++i) {
      if (coords[i] < coords[lo]) lo = i;
      if (coords[i] > coords[hi]) hi = i;
    }
    out.volume = coords[hi] - coords[lo];
    out.full_dimensional = out.volume > 0.0;
    if (want_facets && out.full_dimensional) {
      out.facets.push_back({{1.0}, coords[hi], {hi}});
      out.facets.push_back({{-1.0}, -coords[lo], {lo}});
    }
    return out;
  }
  switch (dim) {
    case 2: return detail::run<2>(coords, want_facets);
    case 3: return detail::run<3>(coords, want_facets);
    case 4: return detail::run<4>(coords, want_facets);
    case 5: return detail::run<5>(coords, want_facets);
    case 6: return detail::run<6>(coords, want_facets);
    case 7: return detail::run<7>(coords, want_facets);
    default: return detail::run<8>(coords, want_facets);
  }
}

}  // namespace kubota::hull
