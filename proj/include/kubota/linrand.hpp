#pragma once

// Deterministic randomness: counter-derived substreams, Gaussian and sphere
// sampling, and Haar-distributed k-frames.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kubota/errors.hpp"

namespace kubota {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  return splitmix64(x);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// A reproducible random stream identified by (root seed, index path).
///
/// The generator is xoshiro256++; its state is a hash of the root seed and
/// every index of the path (including the path length), so substream j of
/// experiment i is fixed before any work is scheduled. Streams are plain
/// values: copy one to replay it, move it to another thread freely.
class SeedStream {
 public:
  SeedStream() : SeedStream(0, {}) {}

  SeedStream(std::uint64_t root, std::vector<std::uint64_t> path)
      : root_(root), path_(std::move(path)) {
    std::uint64_t h = detail::mix64(root_ ^ 0x243F6A8885A308D3ULL);
    for (std::size_t i = 0; i < path_.size(); ++i) {
      const std::uint64_t salt = (i + 1) * 0xD1B54A32D192ED03ULL;
      h = detail::mix64(h ^ detail::mix64(path_[i] + salt));
    }
    std::uint64_t s = h;
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  std::uint64_t root() const noexcept { return root_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  /// Fresh stream for (root, path + [index]); does not touch this stream.
  SeedStream child(std::uint64_t index) const {
    std::vector<std::uint64_t> p = path_;
    p.push_back(index);
    return SeedStream(root_, std::move(p));
  }

  SeedStream child(std::initializer_list<std::uint64_t> indices) const {
    std::vector<std::uint64_t> p = path_;
    p.insert(p.end(), indices.begin(), indices.end());
    return SeedStream(root_, std::move(p));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Fill `out` with i.i.d. standard normals. Box-Muller on consecutive
  /// uniform pairs; an odd tail discards the unused half of the last pair so
  /// consumption is exactly 2*ceil(len/2) words.
  void fill_gaussian(std::span<double> out) noexcept {
    std::size_t i = 0;
    while (i < out.size()) {
      const double u1 = next_uniform();
      const double u2 = next_uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double a = 2.0 * std::numbers::pi * u2;
      out[i++] = r * std::cos(a);
      if (i < out.size()) out[i++] = r * std::sin(a);
    }
  }

 private:
  std::uint64_t root_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint64_t, 4> state_{};
};

inline SeedStream derive_stream(std::uint64_t root, std::span<const std::uint64_t> path) {
  return SeedStream(root, std::vector<std::uint64_t>(path.begin(), path.end()));
}

inline SeedStream derive_stream(std::uint64_t root,
                                std::initializer_list<std::uint64_t> path = {}) {
  return SeedStream(root, std::vector<std::uint64_t>(path));
}

inline Eigen::VectorXd sample_gaussian(SeedStream& stream, int n) {
  if (n < 1) throw DimensionError("sample_gaussian: n must be >= 1");
  Eigen::VectorXd g(n);
  stream.fill_gaussian(std::span<double>(g.data(), static_cast<std::size_t>(n)));
  return g;
}

inline Eigen::VectorXd sample_sphere(SeedStream& stream, int n) {
  if (n < 1) throw DimensionError("sample_sphere: n must be >= 1");
  Eigen::VectorXd g(n);
  for (;;) {
    stream.fill_gaussian(std::span<double>(g.data(), static_cast<std::size_t>(n)));
    const double r = g.norm();
    if (r > 0.0) return g / r;
  }
}

/// An orthonormal k-frame in R^n: a point of the Grassmannian G_{n,k}
/// together with its projection map.
class Subspace {
 public:
  /// `frame` holds k orthonormal rows of length n.
  explicit Subspace(Eigen::MatrixXd frame) : frame_(std::move(frame)) {
    const auto k = frame_.rows();
    const auto n = frame_.cols();
    if (k < 1 || k > n - 1) {
      throw DimensionError("Subspace: need 1 <= k <= n-1, got k=" + std::to_string(k) +
                           ", n=" + std::to_string(n));
    }
  }

  int n() const noexcept { return static_cast<int>(frame_.cols()); }
  int k() const noexcept { return static_cast<int>(frame_.rows()); }
  const Eigen::MatrixXd& frame() const noexcept { return frame_; }

  /// P_E x in frame coordinates.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    if (x.size() != frame_.cols()) throw DimensionError("Subspace::project: length mismatch");
    return frame_ * x;
  }

  /// The ambient vector E^T u for u in frame coordinates.
  Eigen::VectorXd lift(const Eigen::VectorXd& u) const {
    if (u.size() != frame_.rows()) throw DimensionError("Subspace::lift: length mismatch");
    return frame_.transpose() * u;
  }

  /// max |F F^T - I| entrywise.
  double gram_residual() const {
    const Eigen::MatrixXd g = frame_ * frame_.transpose();
    return (g - Eigen::MatrixXd::Identity(k(), k())).cwiseAbs().maxCoeff();
  }

 private:
  Eigen::MatrixXd frame_;
};

/// Haar-distributed subspace: thin QR of an n x k Gaussian matrix with the
/// diagonal of R made positive, which makes Q exactly Haar on the Stiefel
/// manifold.
inline Subspace sample_haar_subspace(SeedStream& stream, int n, int k) {
  if (k < 1 || k > n - 1) {
    throw DimensionError("sample_haar_subspace: need 1 <= k <= n-1, got n=" + std::to_string(n) +
                         ", k=" + std::to_string(k));
  }
  Eigen::MatrixXd g(n, k);
  stream.fill_gaussian(std::span<double>(g.data(), static_cast<std::size_t>(n) * k));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return Subspace(q.transpose());
}

}  // namespace kubota
