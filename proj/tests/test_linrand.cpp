#include <gtest/gtest.h>

#include <cmath>

#include "kubota/linrand.hpp"

using namespace kubota;

TEST(SeedStream, SamePathSameBytes) {
  SeedStream a = derive_stream(42, {0});
  SeedStream b = derive_stream(42, {0});
  for (int i = 0; i < 64; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeedStream, SiblingPathsDiffer) {
  SeedStream a = derive_stream(42, {0});
  SeedStream b = derive_stream(42, {1});
  EXPECT_NE(a.next_u64(), b.next_u64());
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(SeedStream, EmptyPathIsValid) {
  SeedStream s = derive_stream(42);
  const double u = s.next_uniform();
  EXPECT_GT(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(SeedStream, ChildMatchesExplicitPath) {
  const SeedStream root = derive_stream(9, {3});
  SeedStream a = root.child(5);
  SeedStream b = derive_stream(9, {3, 5});
  EXPECT_EQ(a.next_u64(), b.next_u64());
  SeedStream c = root.child({5, 7});
  SeedStream d = derive_stream(9, {3, 5, 7});
  EXPECT_EQ(c.next_u64(), d.next_u64());
}

TEST(Gaussian, MomentsInOneDimension) {
  SeedStream s = derive_stream(1, {0});
  const int N = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < N; ++i) {
    const double g = sample_gaussian(s, 1)(0);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / N;
  EXPECT_LE(std::abs(mean), 4.0 / std::sqrt(N));
  EXPECT_NEAR(sq / N - mean * mean, 1.0, 0.05);
}

TEST(Gaussian, LengthAndAdvance) {
  SeedStream s = derive_stream(1, {1});
  const Eigen::VectorXd a = sample_gaussian(s, 3);
  const Eigen::VectorXd b = sample_gaussian(s, 3);
  EXPECT_EQ(a.size(), 3);
  EXPECT_NE(a, b);
  EXPECT_THROW(sample_gaussian(s, 0), DimensionError);
}

TEST(Sphere, UnitNorm) {
  SeedStream s = derive_stream(2, {0});
  for (int n : {1, 2, 5, 64}) {
    for (int i = 0; i < 100; ++i) EXPECT_NEAR(sample_sphere(s, n).norm(), 1.0, 1e-12);
  }
}

TEST(Sphere, MeanVectorNearZero) {
  SeedStream s = derive_stream(2, {1});
  const int N = 100000;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (int i = 0; i < N; ++i) sum += sample_sphere(s, 4);
  EXPECT_LE((sum / N).norm(), 5.0 / std::sqrt(N));
}

TEST(Sphere, SignSymmetryInOneDimension) {
  SeedStream s = derive_stream(2, {2});
  int plus = 0;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    const double x = sample_sphere(s, 1)(0);
    ASSERT_TRUE(x == 1.0 || x == -1.0);
    plus += x > 0.0;
  }
  EXPECT_NEAR(static_cast<double>(plus) / N, 0.5, 0.01);
}

TEST(Haar, FrameIsOrthonormal) {
  SeedStream s = derive_stream(3, {0});
  const Subspace E = sample_haar_subspace(s, 5, 2);
  EXPECT_EQ(E.k(), 2);
  EXPECT_EQ(E.n(), 5);
  EXPECT_LE(E.gram_residual(), 1e-12);
}

TEST(Haar, ProjectionTraceIdentity) {
  SeedStream s = derive_stream(3, {1});
  const int n = 7;
  const int k = 3;
  const int N = 10000;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u(0) = 1.0;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = sample_haar_subspace(s, n, k).project(u).squaredNorm();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / N;
  const double se = std::sqrt((sq / N - mean * mean) / N);
  EXPECT_NEAR(mean, static_cast<double>(k) / n, 5.0 * se);
}

TEST(Haar, InvalidDimensions) {
  SeedStream s = derive_stream(3, {2});
  EXPECT_THROW(sample_haar_subspace(s, 3, 3), DimensionError);
  EXPECT_THROW(sample_haar_subspace(s, 3, 0), DimensionError);
}

TEST(Haar, Deterministic) {
  SeedStream a = derive_stream(4, {0});
  SeedStream b = derive_stream(4, {0});
  EXPECT_EQ(sample_haar_subspace(a, 10, 4).frame(), sample_haar_subspace(b, 10, 4).frame());
}
