#include <gtest/gtest.h>

#include <cmath>

#include "kubota/bodies.hpp"
#include "kubota/body_io.hpp"
#include "oracles.hpp"

using namespace kubota;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> cs) {
  const auto n = static_cast<Eigen::Index>(cs.begin()->size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(cs.size()));
  Eigen::Index j = 0;
  for (const auto& c : cs) m.col(j++) = vec(c);
  return m;
}

}  // namespace

TEST(Support, Examples) {
  EXPECT_NEAR(support(Body::cube(2), vec({0.6, 0.8})), 1.4, 1e-15);
  EXPECT_NEAR(support(Body::lp_ball(3, 1.0), vec({0.5, -0.5, 0.7})), 0.7, 1e-15);
  const Eigen::Vector3d u = Eigen::Vector3d::Ones() / std::sqrt(3.0);
  const Body z = Body::zonotope(Eigen::Matrix3d::Identity());
  EXPECT_NEAR(support(z, u), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(support(z, u), support(Body::cube(3), u), 1e-14);
}

TEST(Support, HomogeneousAndSymmetric) {
  SeedStream s = derive_stream(11);
  const std::vector<Body> bodies = {Body::cube(5, 2.0), Body::lp_ball(5, 3.0), Body::ellipsoid(vec({1, 2, 3, 4, 5})),
                                    Body::lq_zonoid(3.0, Eigen::MatrixXd::Identity(5, 5), Eigen::VectorXd::Ones(5)),
                                    Body::polytope_v(Eigen::MatrixXd::Identity(5, 5))};
  for (const auto& b : bodies) {
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd u = sample_gaussian(s, 5);
      EXPECT_NEAR(support(b, 2.5 * u), 2.5 * support(b, u), 1e-12) << b.kind();
      EXPECT_NEAR(support(b, -u), support(b, u), 1e-12) << b.kind();
    }
  }
}

TEST(Support, DimensionMismatch) {
  EXPECT_THROW(support(Body::cube(3), vec({1, 0})), DimensionError);
}

TEST(Gauge, Examples) {
  EXPECT_NEAR(gauge(Body::cube(2), vec({0.3, -0.9})), 0.9, 1e-15);
  EXPECT_NEAR(gauge(Body::lp_ball(3, 2.0), vec({3, 4, 0})), 5.0, 1e-14);
  EXPECT_THROW(gauge(Body::zonotope(Eigen::Matrix2d::Identity()), vec({1, 1})), UnsupportedGauge);
}

TEST(SupportGradient, Examples) {
  EXPECT_TRUE(support_gradient(Body::lp_ball(2, 2.0), vec({0.6, 0.8})).isApprox(vec({0.6, 0.8}), 1e-14));
  EXPECT_TRUE(support_gradient(Body::cube(2), vec({0.5, -0.5})).isApprox(vec({1, -1}), 1e-15));
  const Body z = Body::lq_zonoid(2.0, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Ones());
  const Eigen::VectorXd u = vec({1, 1});
  const Eigen::VectorXd x = support_gradient(z, u);
  EXPECT_TRUE(x.isApprox(vec({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), 1e-12));
  EXPECT_NEAR(x.dot(u), support(z, u), 1e-12);
}

TEST(SupportGradient, ContactPointAttainsSupport) {
  SeedStream s = derive_stream(12);
  const std::vector<Body> bodies = {Body::lp_ball(4, 1.5), Body::lp_ball(4, 1.0), Body::ellipsoid(vec({1, 2, 3, 4})),
                                    Body::zonotope(cols({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}}))};
  for (const auto& b : bodies) {
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd u = sample_gaussian(s, 4);
      EXPECT_NEAR(support_gradient(b, u).dot(u), support(b, u), 1e-10) << b.kind();
    }
  }
}

TEST(Radii, Examples) {
  const Radius ball = circumradius(Body::lp_ball(4, 2.0));
  EXPECT_DOUBLE_EQ(ball.value, 1.0);
  EXPECT_TRUE(ball.exact);
  const Radius cube = circumradius(Body::cube(4));
  EXPECT_DOUBLE_EQ(cube.value, 2.0);
  EXPECT_TRUE(cube.exact);
  EXPECT_NEAR(circumradius(Body::polytope_v(cols({{3, 4}, {1, -1}}))).value, 5.0, 1e-15);
  EXPECT_DOUBLE_EQ(inradius(Body::cube(3)).value, 1.0);
  EXPECT_DOUBLE_EQ(inradius(Body::ellipsoid(vec({1, 2, 5}))).value, 1.0);
}

TEST(Radii, CubeCircumradiusMatchesGrid) {
  // max of |u|_1 on S^1 by a fine grid, scaled to n = 4 by sqrt(n/2)
  const double grid = -oracle::min_on_circle([](const Eigen::Vector2d& u) { return -u.cwiseAbs().sum(); }, 100000);
  EXPECT_NEAR(grid, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(circumradius(Body::cube(2)).value, grid, 1e-9);
}

TEST(Radii, LpBallCircumradiusDirection) {
  // B_1^n sits inside the Euclidean ball; B_inf^n does not.
  EXPECT_DOUBLE_EQ(circumradius(Body::lp_ball(16, 1.0)).value, 1.0);
  EXPECT_DOUBLE_EQ(circumradius(Body::lp_ball(16, kInf)).value, 4.0);
  EXPECT_DOUBLE_EQ(inradius(Body::lp_ball(16, 1.0)).value, 0.25);
  EXPECT_NEAR(circumradius(Body::lp_ball(16, 4.0)).value, std::pow(16.0, 0.25), 1e-12);
}

TEST(Radii, ZonotopeInradiusApproximate) {
  const Body z = Body::zonotope(cols({{1, 0}, {0, 1}, {0.5, 0.5}}));
  const double grid = oracle::min_on_circle(
      [&](const Eigen::Vector2d& u) { return support(z, Eigen::VectorXd(u)); }, 100000);
  const Radius r = inradius(z);
  EXPECT_FALSE(r.exact);
  EXPECT_GE(r.value, grid - 1e-9);
  EXPECT_NEAR(r.value, grid, 1e-6);
}

TEST(Radii, ZonotopeCircumradiusAgainstCube) {
  const Radius r = circumradius(Body::zonotope(Eigen::MatrixXd::Identity(5, 5)));
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.value, std::sqrt(5.0), 1e-9);
}

TEST(Isotropy, Examples) {
  const IsotropyReport basis = check_isotropic(Eigen::MatrixXd::Identity(6, 6), Eigen::VectorXd::Ones(6));
  EXPECT_NEAR(basis.deficit, 0.0, 1e-15);
  EXPECT_TRUE(basis.is_isotropic);
  const IsotropyReport single = check_isotropic(cols({{1, 0}}), vec({1}));
  EXPECT_NEAR(single.deficit, 1.0, 1e-15);
  EXPECT_FALSE(single.is_isotropic);
  const double h = 1 / std::sqrt(2.0);
  const IsotropyReport four = check_isotropic(cols({{1, 0}, {0, 1}, {h, h}, {-h, h}}), vec({0.5, 0.5, 0.5, 0.5}));
  EXPECT_NEAR(four.deficit, 0.0, 1e-15);
  EXPECT_THROW(check_isotropic(cols({{2, 0}}), vec({1})), ValidationError);
}

TEST(GeometricDistance, Examples) {
  EXPECT_DOUBLE_EQ(geometric_distance(Body::lp_ball(7, 2.0)).value, 1.0);
  EXPECT_DOUBLE_EQ(geometric_distance(Body::cube(9)).value, 3.0);
  EXPECT_DOUBLE_EQ(geometric_distance(Body::ellipsoid(vec({1, 4}))).value, 4.0);
}

TEST(Factories, Validation) {
  EXPECT_THROW(Body::cube(0), ValidationError);
  EXPECT_THROW(Body::lp_ball(3, 0.5), ValidationError);
  EXPECT_THROW(Body::ellipsoid(vec({1, 0})), ValidationError);
  EXPECT_THROW(Body::zonotope(cols({{1, 0}, {2, 0}})), ValidationError);
  EXPECT_THROW(Body::lq_zonoid(2.0, cols({{1, 1}}), vec({1})), ValidationError);
  EXPECT_THROW(Body::lq_zonoid(2.0, Eigen::Matrix2d::Identity(), vec({1, -1})), ValidationError);
}

TEST(Factories, PolytopeSymmetrized) {
  const Body p = Body::polytope_v(cols({{1, 0}, {0, 1}, {-1, 0}}));
  const auto& v = std::get<PolytopeV>(p.variant()).vertices;
  EXPECT_EQ(v.cols(), 4);
  EXPECT_NEAR(support(p, vec({0, -1})), 1.0, 1e-15);
}

TEST(Scaling, ScaledSupport) {
  const Body z = Body::lq_zonoid(3.0, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Ones());
  const Eigen::VectorXd u = vec({0.3, -0.2, 0.9});
  EXPECT_NEAR(support(z.scaled(2.0), u), 2.0 * support(z, u), 1e-14);
  EXPECT_NEAR(support(Body::cube(3).scaled(3.0), u), 3.0 * support(Body::cube(3), u), 1e-14);
}

TEST(BodyIo, ParsesEveryType) {
  EXPECT_EQ(body_from_string(R"({"type":"cube","n":16,"halfwidth":1.0})").dim(), 16);
  EXPECT_EQ(body_from_string(R"({"type":"lp_ball","n":64,"p":1.0})").dim(), 64);
  const Body inf = body_from_string(R"({"type":"lp_ball","n":3,"p":"inf"})");
  EXPECT_TRUE(std::isinf(std::get<LpBall>(inf.variant()).p));
  EXPECT_EQ(body_from_string(R"({"type":"zonotope","generators":[[1,0],[0,1],[1,1]]})").dim(), 2);
  EXPECT_EQ(body_from_string(R"({"type":"ellipsoid","semiaxes":[1,2,3]})").dim(), 3);
  const Body z = body_from_string(
      R"({"type":"lq_zonoid","q":2.0,"atoms":[{"theta":[1,0],"weight":1.0},{"theta":[0,1],"weight":1.0}]})");
  EXPECT_EQ(z.kind(), "lq_zonoid");
  const Body p = body_from_string(R"({"type":"polytope_v","vertices":[[1,0],[0,1]],"label":"diamond"})");
  EXPECT_EQ(std::get<PolytopeV>(p.variant()).vertices.cols(), 4);
  EXPECT_EQ(p.label, "diamond");
}

TEST(BodyIo, Diagnostics) {
  try {
    body_from_string("{\"type\":\"cube\",\n\"n\": 4,,}");
    FAIL() << "no error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  try {
    body_from_string(R"({"type":"zonotope","generators":[[1,0],[0,1,2]]})");
    FAIL() << "no error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("generators[1]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(body_from_string(R"({"type":"lp_ball","n":4})"), ValidationError);
  EXPECT_THROW(body_from_string(R"({"type":"blob","n":4})"), ValidationError);
  EXPECT_THROW(body_from_string(R"({"type":"cube","n":"four"})"), ValidationError);
}

TEST(BodyIo, RoundTrip) {
  const std::vector<Body> bodies = {
      Body::cube(3, 2.0), Body::lp_ball(4, kInf), Body::ellipsoid(vec({1, 2})),
      Body::zonotope(cols({{1, 0}, {0, 1}, {1, 1}})),
      Body::lq_zonoid(3.0, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Ones()),
      Body::polytope_v(cols({{1, 0}, {0, 1}}))};
  for (const auto& b : bodies) {
    const json j = body_to_json(b);
    EXPECT_EQ(body_to_json(body_from_json(j)), j) << j.dump();
  }
}
