#include "lgpdo/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgpdo {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// d^{j0}_{m1 m2} at the starting spin j0 = max(|m1|, |m2|); arguments doubled.
double d_start(int t0, int tm1, int tm2, double c, double s) {
  if (std::abs(tm2) >= std::abs(tm1)) {
    if (tm2 == t0) return std::sqrt(binomial(t0, (t0 + tm1) / 2)) * ipow(c, (t0 + tm1) / 2) * ipow(s, (t0 - tm1) / 2);
    const int e = (-tm1 - t0) / 2;
    const double sign = (e % 2 == 0) ? 1.0 : -1.0;
    return sign * std::sqrt(binomial(t0, (t0 - tm1) / 2)) * ipow(c, (t0 - tm1) / 2) * ipow(s, (t0 + tm1) / 2);
  }
  if (tm1 == t0) {
    const int e = (tm2 - t0) / 2;
    const double sign = (e % 2 == 0) ? 1.0 : -1.0;
    return sign * std::sqrt(binomial(t0, (t0 + tm2) / 2)) * ipow(c, (t0 + tm2) / 2) * ipow(s, (t0 - tm2) / 2);
  }
  return std::sqrt(binomial(t0, (t0 - tm2) / 2)) * ipow(c, (t0 - tm2) / 2) * ipow(s, (t0 + tm2) / 2);
}

}  // namespace

std::string to_string(const IrrepLabel& label) {
  if (label.backend == Backend::SU2) {
    if (label.two_spin % 2 == 0) return "l=" + std::to_string(label.two_spin / 2);
    return "l=" + std::to_string(label.two_spin) + "/2";
  }
  std::string s = "k=(";
  for (std::size_t i = 0; i < label.frequency.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(label.frequency[i]);
  }
  return s + ")";
}

Irrep::Irrep(IrrepLabel label) : label_(std::move(label)) {
  if (label_.backend == Backend::SU2) {
    if (label_.two_spin < 0) throw std::invalid_argument("spin must be nonnegative");
    dim_ = label_.two_spin + 1;
    eigenvalue_ = 0.25 * label_.two_spin * (label_.two_spin + 2);
  } else {
    if (label_.frequency.empty()) throw std::invalid_argument("torus label needs a frequency vector");
    dim_ = 1;
    double s = 0.0;
    for (int k : label_.frequency) s += static_cast<double>(k) * k;
    eigenvalue_ = s;
  }
  weight_ = std::sqrt(1.0 + eigenvalue_);
}

std::vector<Eigen::MatrixXd> wigner_small_d_table(int two_spin_max, double beta) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(two_spin_max + 1));
  for (int t = 0; t <= two_spin_max; ++t) out.emplace_back(Eigen::MatrixXd::Zero(t + 1, t + 1));

  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const double x = std::cos(beta);
  for (int tm1 = -two_spin_max; tm1 <= two_spin_max; ++tm1) {
    for (int tm2 = -two_spin_max; tm2 <= two_spin_max; ++tm2) {
      if ((tm1 - tm2) % 2 != 0) continue;
      const int t0 = std::max(std::abs(tm1), std::abs(tm2));
      const double m1 = 0.5 * tm1, m2 = 0.5 * tm2;
      double prev2 = 0.0;
      double prev = d_start(t0, tm1, tm2, c, s);
      out[static_cast<std::size_t>(t0)]((t0 - tm1) / 2, (t0 - tm2) / 2) = prev;
      int t = t0 + 2;
      if (t0 == 0 && t <= two_spin_max) {
        // j = 1, m = m' = 0: the general recursion divides by (j - 1).
        prev2 = prev;
        prev = x;
        out[2](1, 1) = prev;
        t += 2;
      }
      for (; t <= two_spin_max; t += 2) {
        const double j = 0.5 * t;
        const double jm = j - 1.0;
        const double a = jm * std::sqrt((j * j - m2 * m2) * (j * j - m1 * m1));
        const double b = (2.0 * j - 1.0) * (j * jm * x - m1 * m2);
        const double cc = j * std::sqrt(std::max(0.0, (jm * jm - m2 * m2) * (jm * jm - m1 * m1)));
        const double next = (b * prev - cc * prev2) / a;
        out[static_cast<std::size_t>(t)]((t - tm1) / 2, (t - tm2) / 2) = next;
        prev2 = prev;
        prev = next;
      }
    }
  }
  return out;
}

Eigen::MatrixXd wigner_small_d(int two_spin, double beta) {
  return std::move(wigner_small_d_table(two_spin, beta)[static_cast<std::size_t>(two_spin)]);
}

Eigen::MatrixXcd evaluate(const Irrep& irrep, const GroupPoint& x) {
  if (irrep.label().backend != x.backend()) throw std::invalid_argument("irrep and point live on different groups");
  if (x.backend() == Backend::Torus) {
    const auto& k = irrep.label().frequency;
    if (k.size() != x.angles().size()) throw std::invalid_argument("torus dimension mismatch");
    double phase = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) phase += k[i] * x.angles()[i];
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::polar(1.0, phase);
    return m;
  }
  const EulerAngles e = euler_angles(x);
  const int t = irrep.label().two_spin;
  const Eigen::MatrixXd d = wigner_small_d(t, e.beta);
  Eigen::MatrixXcd out(t + 1, t + 1);
  for (int i = 0; i <= t; ++i)
    for (int j = 0; j <= t; ++j)
      out(i, j) = std::polar(d(i, j), -irrep.m(i) * e.alpha - irrep.m(j) * e.gamma);
  return out;
}

std::complex<double> character(const Irrep& irrep, const GroupPoint& x) { return evaluate(irrep, x).trace(); }

std::vector<Eigen::MatrixXcd> evaluate_all(const std::vector<Irrep>& irreps, const GroupPoint& x) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(irreps.size());
  if (x.backend() == Backend::Torus) {
    for (const auto& z : irreps) out.push_back(evaluate(z, x));
    return out;
  }
  const EulerAngles e = euler_angles(x);
  const auto table = wigner_small_d_table(max_two_spin(irreps), e.beta);
  for (const auto& z : irreps) {
    if (z.label().backend != Backend::SU2) throw std::invalid_argument("irrep and point live on different groups");
    const int t = z.label().two_spin;
    const auto& d = table[static_cast<std::size_t>(t)];
    Eigen::MatrixXcd m(t + 1, t + 1);
    for (int i = 0; i <= t; ++i)
      for (int j = 0; j <= t; ++j) m(i, j) = std::polar(d(i, j), -z.m(i) * e.alpha - z.m(j) * e.gamma);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Irrep> enumerate_dual(Backend backend, double cutoff, int torus_dim) {
  if (!(cutoff >= 1.0)) throw std::invalid_argument("dual cutoff must be at least 1");
  const double bound = cutoff * cutoff * (1.0 + 1e-14);
  std::vector<Irrep> out;
  if (backend == Backend::SU2) {
    for (int t = 0;; ++t) {
      Irrep z(IrrepLabel::spin(t));
      if (1.0 + z.eigenvalue() > bound) break;
      out.push_back(std::move(z));
    }
    return out;
  }
  if (torus_dim < 1) throw std::invalid_argument("torus dimension must be positive");
  const int kmax = static_cast<int>(std::floor(std::sqrt(bound - 1.0)));
  std::vector<int> k(static_cast<std::size_t>(torus_dim), -kmax);
  for (;;) {
    Irrep z(IrrepLabel::torus(k));
    if (1.0 + z.eigenvalue() <= bound) out.push_back(std::move(z));
    int i = torus_dim - 1;
    for (; i >= 0; --i) {
      if (++k[static_cast<std::size_t>(i)] <= kmax) break;
      k[static_cast<std::size_t>(i)] = -kmax;
    }
    if (i < 0) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const Irrep& a, const Irrep& b) {
    if (a.eigenvalue() != b.eigenvalue()) return a.eigenvalue() < b.eigenvalue();
    return a.label() < b.label();
  });
  return out;
}

int max_two_spin(const std::vector<Irrep>& duals) {
  int t = 0;
  for (const auto& z : duals) t = std::max(t, z.label().two_spin);
  return t;
}

double weyl_sum(Backend backend, double alpha, double lambda, WeylMode mode, int torus_dim, double tail_cap) {
  const int n = backend == Backend::SU2 ? 3 : torus_dim;
  if (mode == WeylMode::Tail && !(alpha < -1.0))
    throw std::invalid_argument("the Weyl tail sum diverges unless alpha < -1");
  const double hi = mode == WeylMode::Head ? lambda : tail_cap;
  if (hi < 1.0) return 0.0;
  double sum = 0.0;
  for (const auto& z : enumerate_dual(backend, hi, torus_dim)) {
    if (mode == WeylMode::Tail && z.weight() < lambda * (1.0 - 1e-14)) continue;
    const double d = z.dimension();
    sum += d * d * std::pow(z.weight(), alpha * n);
  }
  return sum;
}

}  // namespace lgpdo
