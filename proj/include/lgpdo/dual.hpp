#pragma once

#include <compare>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgpdo/group.hpp"

namespace lgpdo {

// Label of an irreducible unitary representation. SU(2) spins are stored doubled so that
// half-integers are exact integer keys.
struct IrrepLabel {
  Backend backend = Backend::SU2;
  int two_spin = 0;
  std::vector<int> frequency;

  static IrrepLabel spin(int two_spin) { return {Backend::SU2, two_spin, {}}; }
  static IrrepLabel torus(std::vector<int> k) { return {Backend::Torus, 0, std::move(k)}; }

  auto operator<=>(const IrrepLabel&) const = default;
  bool operator==(const IrrepLabel&) const = default;
};

std::string to_string(const IrrepLabel& label);

class Irrep {
 public:
  explicit Irrep(IrrepLabel label);

  const IrrepLabel& label() const { return label_; }
  int dimension() const { return dim_; }
  // Laplace eigenvalue: l(l+1) on SU(2), |k|^2 on the torus.
  double eigenvalue() const { return eigenvalue_; }
  // <zeta> = (1 + eigenvalue)^(1/2)
  double weight() const { return weight_; }
  double spin() const { return 0.5 * label_.two_spin; }
  // Weight m of the basis vector with index i (SU(2): m = l - i).
  double m(int i) const { return spin() - i; }

 private:
  IrrepLabel label_;
  int dim_;
  double eigenvalue_;
  double weight_;
};

// Wigner small-d matrix d^l(beta) with rows/columns ordered m = l, l-1, ..., -l.
Eigen::MatrixXd wigner_small_d(int two_spin, double beta);
// All d^l(beta) for two_spin = 0..two_spin_max, filled by the three-term recursion in l.
std::vector<Eigen::MatrixXd> wigner_small_d_table(int two_spin_max, double beta);

// zeta(x), unitary d x d.
Eigen::MatrixXcd evaluate(const Irrep& irrep, const GroupPoint& x);
std::complex<double> character(const Irrep& irrep, const GroupPoint& x);
// zeta(x) for every irrep in the list, sharing one small-d table.
std::vector<Eigen::MatrixXcd> evaluate_all(const std::vector<Irrep>& irreps, const GroupPoint& x);

// All irreps with <zeta> <= cutoff, sorted by <zeta> (then by label).
std::vector<Irrep> enumerate_dual(Backend backend, double cutoff, int torus_dim = 1);
int max_two_spin(const std::vector<Irrep>& duals);

enum class WeylMode { Head, Tail };

inline constexpr double kDefaultWeylTailCap = 4096.0;

// Sum of d^2 <zeta>^(alpha n) over <zeta> <= lambda (head) or lambda <= <zeta> <= tail_cap (tail).
// The tail requires alpha < -1.
double weyl_sum(Backend backend, double alpha, double lambda, WeylMode mode, int torus_dim = 1,
                double tail_cap = kDefaultWeylTailCap);

}  // namespace lgpdo
