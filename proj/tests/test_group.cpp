#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lgpdo/dual.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"
#include "support.hpp"

using namespace lgpdo;
using lgpdo::testing::random_points;

namespace {

constexpr double kPi = std::numbers::pi;

double quat_gap(const GroupPoint& a, const GroupPoint& b) {
  // q and -q differ as SU(2) elements, so compare componentwise.
  double err = 0.0;
  for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(a.quaternion()[k] - b.quaternion()[k]));
  return err;
}

}  // namespace

TEST(GroupLaw, IdentityAndInverse) {
  const GroupPoint e = GroupPoint::identity(Backend::SU2);
  EXPECT_EQ(inverse(e), e);
  for (const auto& x : random_points(Backend::SU2, 50, 11)) {
    EXPECT_LT(quat_gap(compose(e, x), x), 1e-15);
    EXPECT_LT(quat_gap(compose(x, inverse(x)), e), 1e-12);
    EXPECT_LT(quat_gap(compose(inverse(x), x), e), 1e-12);
    EXPECT_LT(quat_gap(inverse(inverse(x)), x), 1e-15);
  }
}

TEST(GroupLaw, ComposeMatchesMatrixProduct) {
  const Irrep half(IrrepLabel::spin(1));
  const auto pts = random_points(Backend::SU2, 40, 12);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Eigen::MatrixXcd lhs = evaluate(half, compose(pts[i], pts[i + 1]));
    const Eigen::MatrixXcd rhs = evaluate(half, pts[i]) * evaluate(half, pts[i + 1]);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(GroupLaw, Associativity) {
  const auto p = random_points(Backend::SU2, 30, 13);
  for (std::size_t i = 0; i + 2 < p.size(); i += 3)
    EXPECT_LT(quat_gap(compose(compose(p[i], p[i + 1]), p[i + 2]), compose(p[i], compose(p[i + 1], p[i + 2]))), 1e-14);
}

TEST(Distance, SpecialValues) {
  const GroupPoint e = GroupPoint::identity(Backend::SU2);
  EXPECT_EQ(geodesic_distance(e, e), 0.0);
  EXPECT_NEAR(geodesic_distance(e, GroupPoint::su2(-1, 0, 0, 0)), kPi, 1e-15);
  EXPECT_DOUBLE_EQ(diameter(Backend::SU2), kPi);
}

TEST(Distance, ExpOfUnitVectorHasNormT) {
  auto g = lgpdo::testing::rng(14);
  for (int i = 0; i < 20; ++i) {
    const auto a = lgpdo::testing::random_direction(g);
    for (double t : {0.01, 0.1, 1.0, 3.0}) {
      std::vector<double> v{t * a[0], t * a[1], t * a[2]};
      EXPECT_NEAR(norm(exp_map(v, Backend::SU2)), t, 1e-8);
    }
  }
}

TEST(Distance, BiInvariance) {
  const auto p = random_points(Backend::SU2, 300, 15);
  for (std::size_t i = 0; i + 2 < p.size(); i += 3) {
    const double d = geodesic_distance(p[i], p[i + 1]);
    EXPECT_NEAR(geodesic_distance(compose(p[i + 2], p[i]), compose(p[i + 2], p[i + 1])), d, 1e-10);
    EXPECT_NEAR(geodesic_distance(compose(p[i], p[i + 2]), compose(p[i + 1], p[i + 2])), d, 1e-10);
  }
}

TEST(Distance, TriangleInequality) {
  for (Backend b : {Backend::SU2, Backend::Torus}) {
    const int dim = b == Backend::Torus ? 2 : 1;
    const auto p = random_points(b, 3000, 16, dim);
    for (std::size_t i = 0; i + 2 < p.size(); i += 3)
      EXPECT_LE(geodesic_distance(p[i], p[i + 2]),
                geodesic_distance(p[i], p[i + 1]) + geodesic_distance(p[i + 1], p[i + 2]) + 1e-12);
  }
}

TEST(Distance, TorusWrapsAround) {
  const GroupPoint a = GroupPoint::torus({0.1});
  const GroupPoint b = GroupPoint::torus({2 * kPi - 0.1});
  EXPECT_NEAR(geodesic_distance(a, b), 0.2, 1e-14);
  EXPECT_NEAR(diameter(Backend::Torus, 2), kPi * std::sqrt(2.0), 1e-14);
}

TEST(ExpLog, RoundTrip) {
  EXPECT_EQ(exp_map(std::vector<double>{0, 0, 0}, Backend::SU2), GroupPoint::identity(Backend::SU2));
  auto g = lgpdo::testing::rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto a = lgpdo::testing::random_direction(g);
    std::vector<double> v{0.5 * a[0], 0.5 * a[1], 0.5 * a[2]};
    const auto back = log_map(exp_map(v, Backend::SU2));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], v[k], 1e-10);
  }
  EXPECT_THROW(log_map(GroupPoint::su2(-1, 0, 0, 0)), std::domain_error);
}

TEST(Euler, RoundTrip) {
  for (const auto& x : random_points(Backend::SU2, 50, 18)) {
    const EulerAngles a = euler_angles(x);
    EXPECT_LT(quat_gap(from_euler(a.alpha, a.beta, a.gamma), x), 1e-12);
  }
}

TEST(HaarGrid, WeightsSumToOne) {
  for (int n : {2, 5, 8, 16}) {
    const auto grid = haar_grid(Backend::SU2, n);
    double s = 0.0;
    for (double w : grid->weights()) s += w;
    EXPECT_NEAR(s, 1.0, 1e-12) << n;
    EXPECT_EQ(grid->size(), static_cast<std::size_t>(2 * n * n * 4 * n));
    EXPECT_DOUBLE_EQ(grid->exactness_degree(), 2 * n - 1);
  }
  const auto torus = haar_grid(Backend::Torus, 6, 2);
  double s = 0.0;
  for (double w : torus->weights()) s += w;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_EQ(torus->size(), 36u);
}

TEST(HaarGrid, FundamentalEntryIntegratesToZero) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const Irrep half(IrrepLabel::spin(1));
  cplx s = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) s += grid->weight(i) * evaluate(half, grid->node(i))(0, 0);
  EXPECT_LT(std::abs(s), 1e-10);
}

TEST(HaarGrid, CharacterNormByDirectSummation) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const Irrep half(IrrepLabel::spin(1));
  double s = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) s += grid->weight(i) * std::norm(character(half, grid->node(i)));
  EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(HaarGrid, LeftInvarianceOnBandLimitedFunctions) {
  const auto grid = haar_grid(Backend::SU2, 8);
  const auto duals = enumerate_dual(Backend::SU2, 6.0);
  const auto c = lgpdo::testing::flat_coefficients(duals, 19);
  const cplx base = inverse_on_grid(c, grid).integral();
  for (const auto& g : random_points(Backend::SU2, 5, 20)) {
    const GridFunction shifted = GridFunction::sample(grid, [&](const GroupPoint& x) { return inverse(c, compose(g, x)); });
    EXPECT_LT(std::abs(shifted.integral() - base), 1e-8);
  }
}

TEST(HaarGrid, BallMassMatchesClosedFormAndIsMonotone) {
  const auto grid = haar_grid(Backend::SU2, 24);
  const GroupPoint e = GroupPoint::identity(Backend::SU2);
  double prev = 0.0;
  for (double r : {0.3, 0.6, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const double m = grid->ball_mass({e, r});
    EXPECT_GE(m, prev);
    prev = m;
    // Indicator quadrature; the error is set by the node spacing.
    EXPECT_NEAR(m, su2_ball_volume(r), 0.03) << r;
  }
  EXPECT_NEAR(su2_ball_volume(kPi), 1.0, 1e-14);
  // (2/pi) * integral of sin^2 over [0, r]
  EXPECT_NEAR(su2_ball_volume(0.1), (0.2 - std::sin(0.2)) / (2 * kPi), 1e-15);
}

TEST(HaarGrid, JsonRoundTrip) {
  const auto grid = haar_grid(Backend::SU2, 4);
  const auto back = grid_from_json(grid_to_json(*grid));
  ASSERT_EQ(back->size(), grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) EXPECT_DOUBLE_EQ(back->weight(i), grid->weight(i));
}

TEST(HaarGrid, RejectsTinyResolution) { EXPECT_THROW(haar_grid(Backend::SU2, 1), std::invalid_argument); }
