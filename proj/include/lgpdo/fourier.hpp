#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lgpdo/dual.hpp"
#include "lgpdo/group.hpp"

namespace lgpdo {

using cplx = std::complex<double>;

// Complex samples of a function at the nodes of a quadrature grid.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const QuadratureGrid> grid, std::vector<cplx> values);

  static GridFunction zeros(std::shared_ptr<const QuadratureGrid> grid);
  static GridFunction constant(std::shared_ptr<const QuadratureGrid> grid, cplx c);
  static GridFunction sample(std::shared_ptr<const QuadratureGrid> grid,
                             const std::function<cplx(const GroupPoint&)>& f);

  const QuadratureGrid& grid() const { return *grid_; }
  const std::shared_ptr<const QuadratureGrid>& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  // Quadrature integral against normalized Haar measure.
  cplx integral() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, cplx s);
GridFunction operator*(cplx s, GridFunction a);
// Pointwise product.
GridFunction multiply(const GridFunction& a, const GridFunction& b);

// Finite map from irrep labels to d x d matrices, in insertion order.
class FourierCoefficients {
 public:
  FourierCoefficients() = default;
  explicit FourierCoefficients(double cutoff) : cutoff_(cutoff) {}

  // Zero matrices for every irrep in the list.
  static FourierCoefficients zeros(const std::vector<Irrep>& duals, double cutoff);

  void set(const Irrep& irrep, Eigen::MatrixXcd block);
  const Eigen::MatrixXcd* find(const IrrepLabel& label) const;
  Eigen::MatrixXcd& at(std::size_t i) { return blocks_[i]; }
  const Eigen::MatrixXcd& at(std::size_t i) const { return blocks_[i]; }

  std::size_t size() const { return irreps_.size(); }
  const std::vector<Irrep>& irreps() const { return irreps_; }
  const std::vector<Eigen::MatrixXcd>& blocks() const { return blocks_; }
  double cutoff() const { return cutoff_; }

 private:
  double cutoff_ = 0.0;
  std::vector<Irrep> irreps_;
  std::vector<Eigen::MatrixXcd> blocks_;
  std::map<IrrepLabel, std::size_t> index_;
};

// Largest <zeta> among the listed irreps (1 if empty).
double max_weight(const std::vector<Irrep>& duals);

// f^(zeta) = integral of f(x) zeta(x)^* dx by quadrature. On SU(2) Euler grids this uses the
// separable evaluation; forward_direct always sums zeta(x_i)^* node by node.
FourierCoefficients forward(const GridFunction& f, const std::vector<Irrep>& duals);
FourierCoefficients forward_direct(const GridFunction& f, const std::vector<Irrep>& duals);

// f(x) = sum d_zeta Tr(zeta(x) f^(zeta)).
cplx inverse(const FourierCoefficients& coeffs, const GroupPoint& x);
GridFunction inverse_on_grid(const FourierCoefficients& coeffs, std::shared_ptr<const QuadratureGrid> grid);
GridFunction inverse_on_grid_direct(const FourierCoefficients& coeffs, std::shared_ptr<const QuadratureGrid> grid);

// (sum d_zeta ||f^(zeta)||_HS^2)^(1/2)
double spectral_l2_norm(const FourierCoefficients& coeffs);

// True when products of matrix coefficients up to the largest listed irrep integrate exactly on the grid.
bool grid_resolves(const QuadratureGrid& grid, const std::vector<Irrep>& duals);

nlohmann::json coefficients_to_json(const FourierCoefficients& coeffs);
FourierCoefficients coefficients_from_json(const nlohmann::json& j);

}  // namespace lgpdo
