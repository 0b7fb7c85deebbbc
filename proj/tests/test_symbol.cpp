#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lgpdo/dual.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/symbol.hpp"
#include "support.hpp"

using namespace lgpdo;

namespace {

const GroupPoint kE = GroupPoint::identity(Backend::SU2);

GroupPoint axis(int j, double t) {
  std::vector<double> v(3, 0.0);
  v[static_cast<std::size_t>(j)] = t;
  return exp_map(v, Backend::SU2);
}

// Derivative of the fundamental representation along the j-th unit algebra vector, read off the
// quaternion matrix of exp_map(t e_j) = (cos t, sin t e_j).
Eigen::Matrix2cd fundamental_generator(int j) {
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd a;
  if (j == 0) a << 0.0, -I, -I, 0.0;
  if (j == 1) a << 0.0, 1.0, -1.0, 0.0;
  if (j == 2) a << I, 0.0, 0.0, -I;
  return a;
}

double block_gap(const Symbol& a, const Symbol& b, const std::vector<Irrep>& duals, const GroupPoint& x = kE) {
  double err = 0.0;
  for (const auto& z : duals) err = std::max(err, (a(x, z) - b(x, z)).cwiseAbs().maxCoeff());
  return err;
}

// Band-limited symbol with random blocks on spins <= 2 and zero above.
Symbol band_limited_symbol(std::uint64_t seed) {
  auto c = lgpdo::testing::flat_coefficients(enumerate_dual(Backend::SU2, 3.0), seed);
  return multiplier_symbol(
      [c](const Irrep& z, int i, int j) {
        const Eigen::MatrixXcd* m = c.find(z.label());
        return m ? (*m)(i, j) : cplx(0.0);
      },
      {0.0, 1.0, 0.0});
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Multiplier, BesselSymbols) {
  const auto duals = enumerate_dual(Backend::SU2, 6.0);
  EXPECT_EQ(block_gap(bessel_symbol(0.0), identity_symbol(), duals), 0.0);
  const Irrep one(IrrepLabel::spin(2));
  EXPECT_LT((bessel_symbol(-2.0)(one) - Eigen::MatrixXcd::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Multiplier, ProductAndTable) {
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  EXPECT_LT(block_gap(product(bessel_symbol(0.5), bessel_symbol(-0.5)), identity_symbol(), duals), 1e-14);
  FourierCoefficients c = lgpdo::testing::flat_coefficients(duals, 41);
  const Symbol t = table_symbol(c, {0.0, 1.0, 0.0});
  for (std::size_t k = 0; k < duals.size(); ++k) EXPECT_EQ((t(duals[k]) - c.at(k)).norm(), 0.0);
  EXPECT_THROW(t(Irrep(IrrepLabel::spin(40))), std::out_of_range);
}

TEST(Difference, MatchesTransformPath) {
  // Delta_q sigma = F[q r], r the inverse transform of sigma, on an independent fine grid.
  const Symbol sigma = band_limited_symbol(42);
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const auto duals = enumerate_dual(Backend::SU2, 4.0);
  const auto wide = enumerate_dual(Backend::SU2, 3.0);
  const auto grid = haar_grid(Backend::SU2, 10);
  FourierCoefficients rc(3.0);
  for (const auto& z : wide) rc.set(z, sigma(z));
  const GridFunction r = inverse_on_grid(rc, grid);
  for (std::size_t q = 0; q < family.size(); ++q) {
    const GridFunction qr = multiply(r, GridFunction::sample(grid, family.members[q]));
    const auto want = forward(qr, duals);
    const Symbol got = difference_apply(family.members[q], sigma, duals, difference_grid(duals, 1));
    for (std::size_t k = 0; k < duals.size(); ++k)
      EXPECT_LT((got(duals[k]) - want.at(k)).cwiseAbs().maxCoeff(), 1e-12) << family.names[q];
  }
}

TEST(Difference, IdentityIsAnnihilatedWithExtendedWindow) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  for (double cutoff : {4.0, 8.0}) {
    const auto duals = enumerate_dual(Backend::SU2, cutoff);
    const auto grid = difference_grid(duals, 1);
    for (const auto& q : family.members) {
      const Symbol ext = difference_apply(q, identity_symbol(), duals, grid, DifferenceWindow::Extended);
      EXPECT_LT(block_gap(ext, zero_symbol(), duals), 1e-11);
    }
  }
}

TEST(Difference, TruncationErrorLivesOnTheOuterShell) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const auto duals = enumerate_dual(Backend::SU2, 6.0);
  const int top = max_two_spin(duals);
  const Symbol trunc = difference_apply(family.members[0], identity_symbol(), duals, difference_grid(duals, 1),
                                        DifferenceWindow::Truncated);
  double inner = 0.0, outer = 0.0;
  for (const auto& z : duals) {
    const double v = trunc(z).cwiseAbs().maxCoeff();
    (z.label().two_spin == top ? outer : inner) = std::max(z.label().two_spin == top ? outer : inner, v);
  }
  EXPECT_LT(inner, 1e-11);
  EXPECT_GT(outer, 1e-3);
}

TEST(Difference, TorusFiniteDifference) {
  // q = e^{ix} - 1 shifts the frequency by one: (Delta_q s)(k) = s(k - 1) - s(k).
  auto s = [](int k) { return cplx(std::sin(0.7 * k) + 0.1 * k * k, std::cos(1.3 * k)); };
  const Symbol sigma = scalar_multiplier([&](const Irrep& z) { return s(z.label().frequency[0]); }, {0.0, 1.0, 0.0});
  const auto duals = enumerate_dual(Backend::Torus, std::sqrt(1.0 + 64.0));
  ASSERT_EQ(duals.size(), 17u);
  const auto family = DifferenceFamily::standard(Backend::Torus);
  const Symbol d = difference_apply(family.members[0], sigma, duals, difference_grid(duals, 1));
  for (const auto& z : duals) {
    const int k = z.label().frequency[0];
    EXPECT_LT(std::abs(d(z)(0, 0) - (s(k - 1) - s(k))), 1e-12) << k;
  }
}

TEST(Difference, MultiMatchesNestedSingleSteps) {
  const Symbol sigma = bessel_symbol(-1.0);
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const std::vector<int> alpha{2, 0, 3};
  const auto inner_duals = extend_duals(duals, 2);
  const Symbol step1 = difference_apply(family.members[3], sigma, extend_duals(duals, 2), difference_grid(inner_duals, 1));
  const auto mid_duals = extend_duals(duals, 1);
  const Symbol step2 = difference_apply(family.members[0], step1, mid_duals, difference_grid(mid_duals, 1));
  const Symbol nested = difference_apply(family.members[2], step2, duals, difference_grid(duals, 1));
  const Symbol multi = difference_apply_multi(family, alpha, sigma, duals);
  EXPECT_LT(block_gap(nested, multi, duals), 1e-11);
}

TEST(Difference, OperatorsCommute) {
  const Symbol sigma = bessel_symbol(-0.5);
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const std::vector<int> ab{0, 1}, ba{1, 0};
  EXPECT_LT(block_gap(difference_apply_multi(family, ab, sigma, duals), difference_apply_multi(family, ba, sigma, duals), duals),
            1e-11);
}

TEST(Difference, BatchedMatchesMulti) {
  const Symbol sigma = test_operator_symbol();
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const auto duals = enumerate_dual(Backend::SU2, 5.0);
  const auto all = difference_apply_all(family, 2, sigma, duals);
  EXPECT_EQ(all.size(), 10u);  // nondecreasing pairs from four members
  for (const auto& [alpha, d] : all) {
    EXPECT_TRUE(std::is_sorted(alpha.begin(), alpha.end()));
    EXPECT_LT(block_gap(d, difference_apply_multi(family, alpha, sigma, duals), duals), 1e-11);
  }
  EXPECT_THROW(difference_apply_all(family, 1, scale_by_function(sigma, [](const GroupPoint&) { return cplx(1.0); }), duals),
               std::invalid_argument);
}

TEST(Difference, FamilyVanishesOnlyAtIdentity) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  EXPECT_EQ(family.size(), 4u);
  EXPECT_EQ(family.magnitude(kE), 0.0);
  for (const auto& x : lgpdo::testing::random_points(Backend::SU2, 50, 43)) EXPECT_GT(family.magnitude(x), 0.0);
}

TEST(BaseDerivative, XIndependentGivesZero) {
  const Symbol d = base_derivative_apply(0, bessel_symbol(-1.0));
  for (const auto& z : enumerate_dual(Backend::SU2, 4.0)) EXPECT_EQ(d(kE, z).norm(), 0.0);
}

TEST(BaseDerivative, MatchesExactDerivativeOfMatrixCoefficient) {
  const Irrep half(IrrepLabel::spin(1));
  const Symbol sigma = scale_by_function(identity_symbol(), [half](const GroupPoint& x) { return evaluate(half, x)(0, 1); });
  for (const auto& x : lgpdo::testing::random_points(Backend::SU2, 10, 44))
    for (int j = 0; j < 3; ++j) {
      const cplx want = (evaluate(half, x) * fundamental_generator(j))(0, 1);
      const Eigen::MatrixXcd got = base_derivative_apply(j, sigma)(x, half);
      EXPECT_LT(std::abs(got(0, 0) - want), 1e-7);
      EXPECT_LT(std::abs(got(1, 1) - want), 1e-7);
    }
}

TEST(BaseDerivative, CommutatorFollowsTheLieBracket) {
  // [e_1, e_2] = 2 e_3 for the quaternion units.
  const Irrep one(IrrepLabel::spin(2));
  const Symbol sigma = scale_by_function(identity_symbol(), [one](const GroupPoint& x) {
    const Eigen::MatrixXcd m = evaluate(one, x);
    return m(0, 1) + 0.5 * m(2, 1);
  });
  const Irrep z(IrrepLabel::spin(0));
  const double h = 1e-3;
  for (const auto& x : lgpdo::testing::random_points(Backend::SU2, 5, 45)) {
    const cplx d12 = base_derivative_apply(0, base_derivative_apply(1, sigma, h), h)(x, z)(0, 0);
    const cplx d21 = base_derivative_apply(1, base_derivative_apply(0, sigma, h), h)(x, z)(0, 0);
    const cplx d3 = base_derivative_apply(2, sigma, h)(x, z)(0, 0);
    EXPECT_LT(std::abs(d12 - d21 - 2.0 * d3), 1e-4);
  }
}

TEST(Seminorm, IdentityOrderZero) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  EXPECT_NEAR(seminorm_estimate(identity_symbol(), family, {}, {}, enumerate_dual(Backend::SU2, 8.0)), 1.0, 1e-15);
}

TEST(Seminorm, BesselStableUnderDoubling) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const Symbol sigma = bessel_symbol(-2.0);
  const double a = max_seminorm(sigma, family, 2, 0, enumerate_dual(Backend::SU2, 6.0));
  const double b = max_seminorm(sigma, family, 2, 0, enumerate_dual(Backend::SU2, 12.0));
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_LT(std::abs(a - b) / std::max(a, b), 0.1);
}

TEST(Seminorm, DetectsMisdeclaredOrder) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const Symbol wrong = bessel_symbol(-1.0).with_class({-2.0, 1.0, 0.0});
  const double a = seminorm_estimate(wrong, family, {}, {}, enumerate_dual(Backend::SU2, 8.0));
  const double b = seminorm_estimate(wrong, family, {}, {}, enumerate_dual(Backend::SU2, 16.0));
  EXPECT_GT(b / a, 1.8);
}

TEST(Seminorm, TestOperatorStableUnderDoubling) {
  const auto family = DifferenceFamily::standard(Backend::SU2);
  const Symbol sigma = test_operator_symbol();
  const double a = max_seminorm(sigma, family, 2, 0, enumerate_dual(Backend::SU2, 6.0));
  const double b = max_seminorm(sigma, family, 2, 0, enumerate_dual(Backend::SU2, 12.0));
  EXPECT_LT(std::abs(a - b) / std::max(a, b), 0.1);
}

TEST(Cutoff, SupportAndNormalization) {
  const CutoffProfile phi = build_cutoff();
  EXPECT_EQ(phi(0.4), 0.0);
  EXPECT_EQ(phi(1.1), 0.0);
  EXPECT_GT(phi(0.75), 0.0);
  const double total = simpson([&](double t) { return phi(1.0 / t) / t; }, 1.0, 2.0, 4000);
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_DOUBLE_EQ(phi.tail_weight(0.3), 1.0);
  EXPECT_DOUBLE_EQ(phi.tail_weight(1.2), 0.0);
  for (double a : {0.55, 0.7, 0.9})
    EXPECT_NEAR(phi.tail_weight(a), simpson([&](double s) { return phi(s) / s; }, a, 1.0, 4000), 1e-10);
  EXPECT_THROW(build_cutoff(0.0), std::invalid_argument);
}

TEST(Dyadic, PieceSupport) {
  const CutoffProfile phi = build_cutoff();
  const Symbol sigma = bessel_symbol(1.0);
  const auto duals = enumerate_dual(Backend::SU2, 20.0);
  for (double t : {4.0, 8.0, 16.0}) {
    const Symbol st = dyadic_piece(sigma, t, phi);
    for (const auto& z : duals) {
      const double s = z.weight() / t;
      const Eigen::MatrixXcd want = sigma(z) * phi(s);
      EXPECT_LT((st(z) - want).cwiseAbs().maxCoeff(), 1e-14);
      if (s <= 0.5 || s >= 1.0) EXPECT_EQ(st(z).norm(), 0.0);
    }
  }
}

TEST(Dyadic, NumericReconstructionRecoversSymbol) {
  const CutoffProfile phi = build_cutoff();
  const Symbol sigma = bessel_symbol(-1.5);
  const auto duals = enumerate_dual(Backend::SU2, 6.0);
  const double T = 2.5 * max_weight(duals);
  const Symbol closed = dyadic_reconstruction(sigma, T, phi);
  for (const auto& z : duals) {
    // int_1^T phi(<zeta>/t) dt/t in u = log t.
    const double w = simpson([&](double u) { return phi(z.weight() / std::exp(u)); }, 0.0, std::log(T), 20000);
    EXPECT_NEAR(w, 1.0, 1e-8);
    EXPECT_LT((closed(z) - sigma(z)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Subelliptic, ClosedFormBlocks) {
  const auto s = subelliptic_symbols();
  EXPECT_EQ(s.sub_laplacian(Irrep(IrrepLabel::spin(0)))(0, 0), cplx(0.0));
  const Eigen::MatrixXcd one = s.sub_laplacian(Irrep(IrrepLabel::spin(2)));
  EXPECT_EQ(one, (Eigen::Vector3cd(1.0, 2.0, 1.0)).asDiagonal().toDenseMatrix());
}

TEST(Subelliptic, SymbolsMatchFiniteDifferencesOfWignerMatrices) {
  // Z = e_3 / 2, X = e_1 / 2, Y = e_2 / 2; sub_laplacian is -(X^2 + Y^2).
  const auto s = subelliptic_symbols();
  const double h = 1e-3;
  for (int two_spin = 0; two_spin <= 6; ++two_spin) {
    const Irrep z(IrrepLabel::spin(two_spin));
    const int d = z.dimension();
    const Eigen::MatrixXcd dz = (evaluate(z, axis(2, h / 2)) - evaluate(z, axis(2, -h / 2))) / (2 * h);
    EXPECT_LT((dz - s.z(z)).cwiseAbs().maxCoeff(), 1e-5) << two_spin;
    Eigen::MatrixXcd second = Eigen::MatrixXcd::Zero(d, d);
    for (int j : {0, 1})
      second += (evaluate(z, axis(j, h / 2)) - 2.0 * Eigen::MatrixXcd::Identity(d, d) + evaluate(z, axis(j, -h / 2))) / (h * h);
    EXPECT_LT((second + s.sub_laplacian(z)).cwiseAbs().maxCoeff(), 1e-4) << two_spin;
    EXPECT_LT((s.heat(z) - s.z(z) - s.sub_laplacian(z)).norm(), 1e-15);
  }
}

TEST(Subelliptic, ParametrixInvertsOffTheTrivialBlock) {
  const auto s = subelliptic_symbols();
  for (const auto& z : enumerate_dual(Backend::SU2, 20.0)) {
    const int d = z.dimension();
    const Eigen::MatrixXcd want = z.label().two_spin == 0 ? Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(1, 1))
                                                         : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(d, d));
    EXPECT_LT((s.sub_laplacian(z) * s.parametrix_sub(z) - want).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((s.heat(z) * s.parametrix_heat(z) - want).cwiseAbs().maxCoeff(), 1e-14);
  }
}
