#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kubota/projvol.hpp"
#include "oracles.hpp"

using namespace kubota;

namespace {

Subspace coordinate_plane(int n) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, n);
  f(0, 0) = 1.0;
  f(1, 1) = 1.0;
  return Subspace(f);
}

Eigen::MatrixXd random_matrix(SeedStream& s, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) m.col(j) = sample_gaussian(s, rows);
  return m;
}

}  // namespace

TEST(Project, CubeBecomesZonotope) {
  const ProjectedBody pb = project_body(Body::cube(3), coordinate_plane(3));
  ASSERT_TRUE(std::holds_alternative<ZonotopeK>(pb.rep));
  Eigen::MatrixXd expect(2, 3);
  expect << 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(std::get<ZonotopeK>(pb.rep).generators, expect);
}

TEST(Project, CrossPolytopeBecomesPolytope) {
  const ProjectedBody pb = project_body(Body::lp_ball(3, 1.0), coordinate_plane(3));
  ASSERT_TRUE(std::holds_alternative<PolytopeK>(pb.rep));
  const auto& v = std::get<PolytopeK>(pb.rep).vertices;
  EXPECT_EQ(v.cols(), 6);
  EXPECT_NEAR(hull_volume(std::get<PolytopeK>(pb.rep)).value, 2.0, 1e-15);
}

TEST(Project, OracleUsesDualExponent) {
  SeedStream s = derive_stream(31);
  const Subspace E = sample_haar_subspace(s, 3, 2);
  const ProjectedBody pb = project_body(Body::lp_ball(3, 1.5), E);
  ASSERT_TRUE(std::holds_alternative<OracleK>(pb.rep));
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd u = sample_gaussian(s, 2);
    const Eigen::VectorXd x = E.lift(u);
    EXPECT_NEAR(support(pb, u), std::pow(x.cwiseAbs().array().pow(3.0).sum(), 1.0 / 3.0), 1e-13);
  }
}

TEST(Project, SupportCommutesWithProjection) {
  SeedStream s = derive_stream(32);
  const Subspace E = sample_haar_subspace(s, 6, 3);
  const std::vector<Body> bodies = {Body::cube(6), Body::lp_ball(6, 1.0), Body::lp_ball(6, 3.0),
                                    Body::zonotope(random_matrix(s, 6, 8)), Body::polytope_v(random_matrix(s, 6, 8))};
  for (const auto& b : bodies) {
    const ProjectedBody pb = project_body(b, E);
    for (int i = 0; i < 10; ++i) {
      const Eigen::VectorXd u = sample_gaussian(s, 3);
      EXPECT_NEAR(support(pb, u), support(b, E.lift(u)), 1e-12) << b.kind();
    }
  }
}

TEST(ZonotopeVolume, Examples) {
  EXPECT_DOUBLE_EQ(zonotope_volume({Eigen::Matrix3d::Identity()}).value, 8.0);
  Eigen::MatrixXd g(2, 3);
  g << 1, 0, 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(zonotope_volume({g}).value, 4.0);
  g << 1, 0, 1, 0, 1, 1;
  EXPECT_DOUBLE_EQ(zonotope_volume({g}).value, 12.0);
  // hexagon by its vertex hull
  Eigen::MatrixXd ss = oracle::zonotope_sign_sums(g);
  EXPECT_NEAR(hull_volume({ss}).value, 12.0, 1e-12);
}

TEST(ZonotopeVolume, MatchesBruteForce) {
  SeedStream s = derive_stream(33);
  for (int k = 1; k <= 5; ++k) {
    for (int m : {k, k + 1, k + 4, 12}) {
      if (m < k) continue;
      const Eigen::MatrixXd g = random_matrix(s, k, m);
      const double brute = oracle::zonotope_volume_bruteforce(g);
      EXPECT_NEAR(zonotope_volume({g}).value, brute, 1e-11 * brute) << "k=" << k << " m=" << m;
    }
  }
}

TEST(ZonotopeVolume, OrderIndependent) {
  SeedStream s = derive_stream(34);
  const Eigen::MatrixXd g = random_matrix(s, 4, 10);
  Eigen::MatrixXd rev = g.rowwise().reverse();
  const double a = zonotope_volume({g}).value;
  EXPECT_NEAR(zonotope_volume({rev}).value, a, 1e-12 * a);
}

TEST(ZonotopeVolume, DegenerateIsZero) {
  Eigen::MatrixXd g(3, 4);
  g << 1, 0, 1, 2, 0, 1, 1, 3, 0, 0, 0, 0;
  EXPECT_EQ(zonotope_volume({g}).value, 0.0);
}

TEST(ZonotopeVolume, Budget) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(6, 200);
  EXPECT_THROW(zonotope_volume({g}), BudgetError);
  // dispatch falls back to the sandwich bracket
  const ProjectedBody pb{6, ZonotopeK{g}};
  EXPECT_NO_THROW({
    const VolumeResult v = projection_volume(pb);
    EXPECT_EQ(v.method, VolumeMethod::sandwich);
  });
}

TEST(HullVolume, CapAndDegenerate) {
  EXPECT_THROW(hull_volume({Eigen::MatrixXd::Identity(9, 9)}), BudgetError);
  Eigen::MatrixXd v(2, 2);
  v << 1, -1, 1, -1;
  EXPECT_EQ(hull_volume({v}).value, 0.0);
}

TEST(Sandwich, EuclideanDiskIsExact) {
  const ProjectedBody pb = full_projection(Body::lp_ball(2, 2.0), true);
  const VolumeResult v = sandwich_volume(pb);
  EXPECT_NEAR(v.value, std::numbers::pi, 1e-3 * std::numbers::pi);
  EXPECT_TRUE(v.converged);
}

TEST(Sandwich, SquareThroughOracle) {
  const VolumeResult v = sandwich_volume(full_projection(Body::cube(2), true));
  EXPECT_LE(v.lower, 4.0 + 1e-12);
  EXPECT_GE(v.upper, 4.0 - 1e-12);
  EXPECT_NEAR(v.value, 4.0, 4e-3);
}

TEST(Sandwich, L4DiskAgainstQuadrature) {
  const double area = oracle::lp_ball_area(4.0);
  EXPECT_NEAR(area, oracle::lp_ball_volume_gamma(2, 4.0), 1e-10);
  const VolumeResult v = sandwich_volume(full_projection(Body::lp_ball(2, 4.0), true));
  EXPECT_TRUE(v.converged);
  EXPECT_LE(v.lower, area * (1 + 1e-12));
  EXPECT_GE(v.upper, area * (1 - 1e-12));
  EXPECT_NEAR(v.value, area, 1e-3 * area);
}

TEST(Sandwich, BracketContainsProjectedCube) {
  SeedStream s = derive_stream(35);
  const Body cube = Body::cube(5);
  for (int k : {2, 3}) {
    const Subspace E = sample_haar_subspace(s, 5, k);
    const double exact = projection_volume(project_body(cube, E)).value;
    const VolumeResult v = sandwich_volume(project_body(cube, E, true));
    EXPECT_LE(v.lower, exact * (1 + 1e-12));
    EXPECT_GE(v.upper, exact * (1 - 1e-12));
    EXPECT_TRUE(v.converged);
    EXPECT_NEAR(v.value, exact, 1e-3 * exact);
  }
}

TEST(Sandwich, Caps) {
  EXPECT_THROW(sandwich_volume(full_projection(Body::lp_ball(7, 3.0))), BudgetError);
  // ellipsoidal bodies are exact at any k
  const VolumeResult v = sandwich_volume(full_projection(Body::lp_ball(9, 2.0)));
  EXPECT_NEAR(v.value, unit_ball_volume(9), 1e-12);
}

TEST(Vrad, Examples) {
  EXPECT_NEAR(vrad(std::numbers::pi, 2), 1.0, 1e-15);
  EXPECT_NEAR(vrad(4.0, 2), 2.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(vrad(8.0, 3), std::cbrt(8.0 / (4.0 * std::numbers::pi / 3.0)), 1e-14);
  EXPECT_NEAR(vrad(8.0, 3), 1.24070, 1e-5);
  EXPECT_EQ(vrad(0.0, 4), 0.0);
}

TEST(ProjMeanWidth, Examples) {
  SeedStream s = derive_stream(36);
  const Subspace E = sample_haar_subspace(s, 6, 3);
  const Estimate ball = proj_mean_width(project_body(Body::lp_ball(6, 2.0), E), 1000, s);
  EXPECT_NEAR(ball.value, 1.0, 1e-12);
  const Estimate cube = proj_mean_width(project_body(Body::cube(3), coordinate_plane(3)), 1000, s);
  EXPECT_NEAR(cube.value, 4.0 / std::numbers::pi, std::max(3.0 * cube.std_error, 1e-12));
  // Oracle form of the same square goes through sampling.
  const Estimate mc = proj_mean_width(project_body(Body::cube(3), coordinate_plane(3), true), 20000, s);
  EXPECT_GT(mc.std_error, 0.0);
  EXPECT_NEAR(mc.value, 4.0 / std::numbers::pi, 3.0 * mc.std_error);
  const Subspace line = sample_haar_subspace(s, 6, 1);
  const Body b = Body::lp_ball(6, 3.0);
  const Estimate one = proj_mean_width(project_body(b, line), 10, s);
  EXPECT_EQ(one.std_error, 0.0);
  EXPECT_NEAR(one.value, support(b, line.lift(Eigen::VectorXd::Ones(1))), 1e-15);
}

TEST(ProjInradius, Examples) {
  SeedStream s = derive_stream(37);
  const Subspace E = sample_haar_subspace(s, 5, 3);
  EXPECT_NEAR(proj_inradius(project_body(Body::lp_ball(5, 2.0), E)).value, 1.0, 1e-12);
  const Radius sq = proj_inradius(full_projection(Body::cube(2), true));
  EXPECT_FALSE(sq.exact);
  EXPECT_NEAR(sq.value, 1.0, 1e-4);
  EXPECT_NEAR(proj_inradius(full_projection(Body::cube(2))).value, 1.0, 1e-15);
  Eigen::MatrixXd g(2, 2);
  g << 1, 0, 0, 0.1;
  EXPECT_NEAR(proj_inradius({2, ZonotopeK{g}}).value, 0.1, 1e-12);
  EXPECT_THROW(proj_inradius(full_projection(Body::cube(5))), BudgetError);
}

TEST(ProjInradius, ExactPathsAgreeWithGrid) {
  SeedStream s = derive_stream(38);
  const Subspace E = sample_haar_subspace(s, 6, 2);
  for (const Body& b : {Body::cube(6), Body::lp_ball(6, 1.0)}) {
    const Radius exact = proj_inradius(project_body(b, E));
    const Radius grid = proj_inradius(project_body(b, E, true));
    EXPECT_TRUE(exact.exact);
    EXPECT_GE(grid.value, exact.value - 1e-12);
    EXPECT_NEAR(grid.value, exact.value, 1e-6) << b.kind();
  }
}
