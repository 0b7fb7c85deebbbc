#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lgpdo/fourier.hpp"
#include "lgpdo/symbol.hpp"

namespace lgpdo {

// Af(x) = sum d_zeta Tr(zeta(x) sigma(x, zeta) f^(zeta)) on the grid nodes.
GridFunction quantize_apply(const Symbol& sigma, const GridFunction& f, const std::vector<Irrep>& duals);
// Same operator on coefficients, for x-independent sigma: f^ -> sigma f^.
FourierCoefficients quantize_coefficients(const Symbol& sigma, const FourierCoefficients& f);

// K(x, y) = sum d_zeta Tr(zeta(y^-1 x) sigma(x, zeta)); with `t` the dyadic kernel K_t built from sigma_t.
cplx kernel_eval(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y, const std::vector<Irrep>& duals);
cplx kernel_eval_dyadic(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y, const std::vector<Irrep>& duals,
                        double t, const CutoffProfile& phi);
// int_1^T K_t(x, y) dt / t by adaptive quadrature in log t.
cplx kernel_eval_integrated(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y,
                            const std::vector<Irrep>& duals, const CutoffProfile& phi, double T);

// Kernel values K(x, y_n) at the points y_n = x u_n^-1, u_n the grid nodes. The map u -> x u^-1
// preserves Haar measure, so the grid weights remain a valid rule for integrals in y.
struct KernelSlice {
  GroupPoint x;
  std::vector<GroupPoint> y;
  std::vector<double> weights;
  std::vector<cplx> values;
  double cutoff = 0.0;
  std::optional<double> t;
};

KernelSlice kernel_slice(const Symbol& sigma, const GroupPoint& x, std::shared_ptr<const QuadratureGrid> grid,
                         const std::vector<Irrep>& duals, std::optional<double> t = std::nullopt,
                         const CutoffProfile& phi = build_cutoff());
// "distance,abs_kernel" rows, one per slice point.
std::string kernel_slice_csv(const KernelSlice& slice);

struct HormanderOptions {
  // t-cap T = factor * max <zeta>; factor >= 2 reproduces the truncated symbol exactly, factor 1 rolls it off smoothly.
  double t_cap_factor = 1.0;
  // Weight nodes within one grid spacing of the excluded ball boundary by a linear ramp.
  bool smooth_boundary = true;
};

// Excluded radius: 2 R^rho for R < 1, 2R for R >= 1.
double hormander_radius(double R, double rho);

// integral over the complement of B(z, r(R)) of |K(x, y) - K(x, z)| dx for x-independent sigma,
// assembled from the dyadic pieces. y must lie in the closed ball B(z, R).
double hormander_integral(const Symbol& sigma, const GroupPoint& z, const GroupPoint& y, double R,
                          const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid,
                          const HormanderOptions& options = {});

// p = q = 2: exact block norm for x-independent sigma, power iteration on A*A otherwise.
// Other exponents: largest ||Af||_q / ||f||_p over `trials` seeded random band-limited f.
double operator_norm_estimate(const Symbol& sigma, double p, double q, const std::vector<Irrep>& duals,
                              std::shared_ptr<const QuadratureGrid> grid, int trials = 20, std::uint64_t seed = 1);

// Seeded random coefficients with Gaussian blocks scaled by <zeta>^(-decay).
FourierCoefficients random_coefficients(const std::vector<Irrep>& duals, std::uint64_t seed, double decay = 3.0);

}  // namespace lgpdo
