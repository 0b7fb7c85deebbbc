#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lgpdo/dual.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"

namespace lgpdo::testing {

using cplx = std::complex<double>;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<GroupPoint> random_points(Backend b, int count, std::uint64_t seed, int torus_dim = 1) {
  auto g = rng(seed);
  std::vector<GroupPoint> out;
  for (int i = 0; i < count; ++i) out.push_back(random_point(b, g, torus_dim));
  return out;
}

inline std::vector<double> random_direction(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  std::vector<double> v{n(g), n(g), n(g)};
  const double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& c : v) c /= s;
  return v;
}

inline Eigen::MatrixXcd random_block(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(n(g), n(g));
  return m;
}

// Unit-scale random coefficients on every listed irrep (no decay).
inline FourierCoefficients flat_coefficients(const std::vector<Irrep>& duals, std::uint64_t seed) {
  auto g = rng(seed);
  FourierCoefficients c(max_weight(duals));
  for (const auto& z : duals) c.set(z, random_block(z.dimension(), g));
  return c;
}

inline double max_abs_diff(const FourierCoefficients& a, const FourierCoefficients& b) {
  double err = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Eigen::MatrixXcd* m = b.find(a.irreps()[k].label());
    err = std::max(err, m ? (a.at(k) - *m).cwiseAbs().maxCoeff() : a.at(k).cwiseAbs().maxCoeff());
  }
  return err;
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
  return err;
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// Closed-form Wigner small-d sum; rows and columns ordered m = l, l-1, ..., -l.
inline Eigen::MatrixXd wigner_d_closed_form(int two_spin, double beta) {
  const int d = two_spin + 1;
  Eigen::MatrixXd out(d, d);
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  const int j2 = two_spin;
  for (int r = 0; r < d; ++r)
    for (int col = 0; col < d; ++col) {
      // Doubled weights keep half-integer spins exact; j +- m are integers.
      const int mp2 = j2 - 2 * r, m2 = j2 - 2 * col;
      const int jpmp = (j2 + mp2) / 2, jmmp = (j2 - mp2) / 2, jpm = (j2 + m2) / 2, jmm = (j2 - m2) / 2;
      const int dm = (mp2 - m2) / 2;
      double sum = 0.0;
      for (int k = 0; k <= j2; ++k) {
        if (jpm - k < 0 || dm + k < 0 || jmmp - k < 0) continue;
        const double sign = ((dm + k) % 2 == 0) ? 1.0 : -1.0;
        sum += sign / (factorial(jpm - k) * factorial(k) * factorial(dm + k) * factorial(jmmp - k)) *
               std::pow(c, j2 - dm - 2 * k) * std::pow(s, dm + 2 * k);
      }
      out(r, col) = std::sqrt(factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)) * sum;
    }
  return out;
}

}  // namespace lgpdo::testing
