#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lgpdo/dual.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"

namespace lgpdo {

// Declared Hormander class S^m_{rho,delta}.
struct SymbolClass {
  double m = 0.0;
  double rho = 1.0;
  double delta = 0.0;
};

// Matrix-valued symbol sigma(x, zeta), evaluated lazily.
class Symbol {
 public:
  using Eval = std::function<Eigen::MatrixXcd(const GroupPoint& x, const Irrep& z)>;

  Symbol(Eval eval, SymbolClass cls, bool x_independent, nlohmann::json descriptor = {});

  Eigen::MatrixXcd operator()(const GroupPoint& x, const Irrep& z) const;
  // Only for x-independent symbols.
  Eigen::MatrixXcd operator()(const Irrep& z) const;

  const SymbolClass& symbol_class() const { return cls_; }
  bool x_independent() const { return x_independent_; }
  const nlohmann::json& descriptor() const { return descriptor_; }

  Symbol with_class(SymbolClass cls) const;
  Symbol with_descriptor(nlohmann::json d) const;

 private:
  std::shared_ptr<const Eval> eval_;
  SymbolClass cls_;
  bool x_independent_;
  nlohmann::json descriptor_;
};

// x-independent symbol with entries given by entry(zeta, i, j).
Symbol multiplier_symbol(std::function<cplx(const Irrep&, int, int)> entry, SymbolClass cls,
                         nlohmann::json descriptor = {});
// s(zeta) times the identity.
Symbol scalar_multiplier(std::function<cplx(const Irrep&)> s, SymbolClass cls, nlohmann::json descriptor = {});
Symbol identity_symbol();
Symbol zero_symbol();
// <zeta>^beta I, the symbol of the Bessel potential J^beta; class (beta, 1, 0).
Symbol bessel_symbol(double beta);
// x-independent symbol backed by precomputed blocks; evaluating an unlisted irrep throws.
Symbol table_symbol(const FourierCoefficients& blocks, SymbolClass cls, nlohmann::json descriptor = {});
// Pointwise matrix product sigma(x,zeta) tau(x,zeta), the symbol of Op(sigma) Op(tau) when tau is x-independent.
Symbol product(const Symbol& a, const Symbol& b);
// sigma(x, zeta) phi(x).
Symbol scale_by_function(const Symbol& s, std::function<cplx(const GroupPoint&)> phi);

// Smooth functions q vanishing at e that define difference operators. On SU(2) these are the four
// entries t^{1/2}_{ij} - delta_ij of the fundamental representation; on the torus e^{i x_k} - 1.
// Each member carries one step of spectral width (spin 1/2, or frequency +-1).
struct DifferenceFamily {
  Backend backend = Backend::SU2;
  int torus_dim = 1;
  std::vector<std::function<cplx(const GroupPoint&)>> members;
  std::vector<std::string> names;

  static DifferenceFamily standard(Backend backend, int torus_dim = 1);
  std::size_t size() const { return members.size(); }
  // max_k |q_k(x)|; positive away from e for a strongly admissible family.
  double magnitude(const GroupPoint& x) const;
};

enum class DifferenceWindow {
  // Build the kernel from irreps one step beyond the output set; exact for members of spectral width one.
  Extended,
  // Use only the output irreps; the outermost shell carries the truncation error.
  Truncated,
};

// Output irreps plus everything reachable by `steps` one-step moves.
std::vector<Irrep> extend_duals(const std::vector<Irrep>& duals, int steps);
// Coarsest grid on which products of q, the extended kernel and the output irreps integrate exactly.
std::shared_ptr<const QuadratureGrid> difference_grid(const std::vector<Irrep>& duals, int steps);

// (Delta_q sigma)(x, zeta) = integral of q(u) r_x(u) zeta(u)^* du, r_x the inverse transform of sigma(x, .).
// The result is tabulated on `duals` (per base point for x-dependent sigma).
Symbol difference_apply(const std::function<cplx(const GroupPoint&)>& q, const Symbol& sigma,
                        const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid,
                        DifferenceWindow window = DifferenceWindow::Extended);
// Delta^alpha sigma, alpha a sequence of family indices applied right to left.
Symbol difference_apply_multi(const DifferenceFamily& family, std::span<const int> alpha, const Symbol& sigma,
                              const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid = nullptr);

// Delta^alpha sigma for every nondecreasing alpha of the given order, sharing one kernel; x-independent sigma only.
std::vector<std::pair<std::vector<int>, Symbol>> difference_apply_all(const DifferenceFamily& family, int order,
                                                                      const Symbol& sigma,
                                                                      const std::vector<Irrep>& duals,
                                                                      std::shared_ptr<const QuadratureGrid> grid = nullptr);

inline constexpr double kBaseDerivativeStep = 1e-4;

// Second-order central difference along t -> x exp(t Y_j), Y_j the j-th unit algebra vector.
Symbol base_derivative_apply(int direction, const Symbol& sigma, double h = kBaseDerivativeStep);

// sup over base points and irreps of ||Delta^alpha d^beta sigma||_op / <zeta>^(m - rho|alpha| + delta|beta|).
// x-independent symbols are evaluated at e; otherwise at the supplied base points (default: e and a
// fixed subsample of 16 nodes of a resolution-4 grid).
double seminorm_estimate(const Symbol& sigma, const DifferenceFamily& family, std::span<const int> alpha,
                         std::span<const int> beta, const std::vector<Irrep>& duals,
                         std::span<const GroupPoint> base_points = {});
// Largest seminorm over all alpha, beta with |alpha| <= max_alpha, |beta| <= max_beta.
double max_seminorm(const Symbol& sigma, const DifferenceFamily& family, int max_alpha, int max_beta,
                    const std::vector<Irrep>& duals, std::span<const GroupPoint> base_points = {});

// phi(s) = exp(-p / (1 - u^2)), u = 4s - 3, on (1/2, 1), scaled so that int_{1/2}^{1} phi(s) ds/s = 1.
class CutoffProfile {
 public:
  double operator()(double s) const;
  double smoothness() const { return p_; }
  double normalization() const { return scale_; }
  // W(a) = int_a^1 phi(s) ds/s: 1 for a <= 1/2, 0 for a >= 1.
  double tail_weight(double a) const;

 private:
  friend CutoffProfile build_cutoff(double smoothness);
  double p_ = 1.0;
  double scale_ = 1.0;
};

CutoffProfile build_cutoff(double smoothness = 1.0);

// sigma_t(x, zeta) = sigma(x, zeta) phi(<zeta> / t); t >= 1.
Symbol dyadic_piece(const Symbol& sigma, double t, const CutoffProfile& phi);
// int_1^T sigma_t dt / t in closed form: sigma(x, zeta) W(<zeta> / T).
Symbol dyadic_reconstruction(const Symbol& sigma, double T, const CutoffProfile& phi);

struct SubellipticSymbols {
  Symbol laplacian;          // l(l+1) I
  Symbol z;                  // diag(i m)
  Symbol sub_laplacian;      // -(X^2 + Y^2): diag(l(l+1) - m^2)
  Symbol heat;               // Z - X^2 - Y^2
  Symbol parametrix_sub;     // entrywise inverse of sub_laplacian, 0 at l = 0
  Symbol parametrix_heat;    // entrywise inverse of heat, 0 at l = 0
};

SubellipticSymbols subelliptic_symbols();
// parametrix_sub composed with <zeta>^(1/4): the class (-3/4, 1/2, 0) test operator.
Symbol test_operator_symbol();

}  // namespace lgpdo
