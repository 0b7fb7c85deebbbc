#include "lgpdo/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lgpdo/function_spaces.hpp"

namespace lgpdo {

namespace {

cplx trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a.transpose().cwiseProduct(b)).sum(); }

FourierCoefficients symbol_table(const Symbol& sigma, const GroupPoint& x, const std::vector<Irrep>& duals) {
  FourierCoefficients c(max_weight(duals));
  for (const auto& z : duals) c.set(z, sigma(x, z));
  return c;
}

// d_zeta Tr(zeta(u) sigma(x, zeta)) for every listed irrep.
std::vector<cplx> kernel_terms(const Symbol& sigma, const GroupPoint& x, const GroupPoint& u,
                               const std::vector<Irrep>& duals) {
  const auto mats = evaluate_all(duals, u);
  std::vector<cplx> out(duals.size());
  for (std::size_t k = 0; k < duals.size(); ++k)
    out[k] = static_cast<double>(duals[k].dimension()) * trace_product(mats[k], sigma(x, duals[k]));
  return out;
}

// Adjoint of Op(sigma) restricted to the listed irreps: w -> int w(x) sigma(x,zeta)^* zeta(x)^* dx.
FourierCoefficients adjoint_apply(const Symbol& sigma, const GridFunction& w, const std::vector<Irrep>& duals) {
  FourierCoefficients out = FourierCoefficients::zeros(duals, max_weight(duals));
  const QuadratureGrid& grid = w.grid();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const cplx ww = grid.weight(n) * w[n];
    if (ww == 0.0) continue;
    const auto mats = evaluate_all(duals, grid.node(n));
    for (std::size_t k = 0; k < duals.size(); ++k)
      out.at(k) += ww * sigma(grid.node(n), duals[k]).adjoint() * mats[k].adjoint();
  }
  return out;
}

double coefficient_norm(const FourierCoefficients& c) { return spectral_l2_norm(c); }

}  // namespace

FourierCoefficients quantize_coefficients(const Symbol& sigma, const FourierCoefficients& f) {
  if (!sigma.x_independent()) throw std::invalid_argument("coefficient-space action needs an x-independent symbol");
  FourierCoefficients out(f.cutoff());
  for (std::size_t k = 0; k < f.size(); ++k) out.set(f.irreps()[k], sigma(f.irreps()[k]) * f.at(k));
  return out;
}

GridFunction quantize_apply(const Symbol& sigma, const GridFunction& f, const std::vector<Irrep>& duals) {
  const FourierCoefficients fh = forward(f, duals);
  if (sigma.x_independent()) return inverse_on_grid(quantize_coefficients(sigma, fh), f.grid_ptr());
  const QuadratureGrid& grid = f.grid();
  std::vector<cplx> v(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const GroupPoint& x = grid.node(n);
    const auto mats = evaluate_all(duals, x);
    cplx s = 0.0;
    for (std::size_t k = 0; k < duals.size(); ++k)
      s += static_cast<double>(duals[k].dimension()) * trace_product(mats[k], sigma(x, duals[k]) * fh.at(k));
    v[n] = s;
  }
  return GridFunction(f.grid_ptr(), std::move(v));
}

cplx kernel_eval(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y, const std::vector<Irrep>& duals) {
  cplx s = 0.0;
  for (const cplx& c : kernel_terms(sigma, x, compose(inverse(y), x), duals)) s += c;
  return s;
}

cplx kernel_eval_dyadic(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y, const std::vector<Irrep>& duals,
                        double t, const CutoffProfile& phi) {
  return kernel_eval(dyadic_piece(sigma, t, phi), x, y, duals);
}

cplx kernel_eval_integrated(const Symbol& sigma, const GroupPoint& x, const GroupPoint& y,
                            const std::vector<Irrep>& duals, const CutoffProfile& phi, double T) {
  if (!(T >= 1.0)) throw std::invalid_argument("t-cap must be at least 1");
  const auto terms = kernel_terms(sigma, x, compose(inverse(y), x), duals);
  const double smax = std::log(T);
  // K_t is smooth in s = log t; breaking at each support edge keeps every panel smooth.
  std::vector<double> breaks{0.0, smax};
  for (const auto& z : duals)
    for (double b : {std::log(z.weight()), std::log(2.0 * z.weight())})
      if (b > 0.0 && b < smax) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto part = [&](bool imag) {
    auto f = [&](double s) {
      const double t = std::exp(s);
      double v = 0.0;
      for (std::size_t k = 0; k < duals.size(); ++k) {
        const double w = phi(duals[k].weight() / t);
        if (w != 0.0) v += w * (imag ? terms[k].imag() : terms[k].real());
      }
      return v;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, breaks[i], breaks[i + 1], 10, 1e-13);
    return total;
  };
  return {part(false), part(true)};
}

KernelSlice kernel_slice(const Symbol& sigma, const GroupPoint& x, std::shared_ptr<const QuadratureGrid> grid,
                         const std::vector<Irrep>& duals, std::optional<double> t, const CutoffProfile& phi) {
  const Symbol s = t ? dyadic_piece(sigma, *t, phi) : sigma;
  const GridFunction r = inverse_on_grid(symbol_table(s, x, duals), grid);
  KernelSlice out{x, {}, grid->weights(), r.values(), max_weight(duals), t};
  out.y.reserve(grid->size());
  for (const auto& u : grid->nodes()) out.y.push_back(compose(x, inverse(u)));
  return out;
}

std::string kernel_slice_csv(const KernelSlice& slice) {
  std::ostringstream os;
  os.precision(17);
  os << "distance,abs_kernel\n";
  for (std::size_t i = 0; i < slice.y.size(); ++i)
    os << geodesic_distance(slice.x, slice.y[i]) << ',' << std::abs(slice.values[i]) << '\n';
  return os.str();
}

double hormander_radius(double R, double rho) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return R < 1.0 ? 2.0 * std::pow(R, rho) : 2.0 * R;
}

double hormander_integral(const Symbol& sigma, const GroupPoint& z, const GroupPoint& y, double R,
                          const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid,
                          const HormanderOptions& options) {
  if (!sigma.x_independent()) throw std::invalid_argument("kernel integrals are implemented for x-independent symbols");
  if (geodesic_distance(z, y) > R * (1.0 + 1e-12)) throw std::invalid_argument("y must lie in the closed ball B(z, R)");
  const double r0 = hormander_radius(R, sigma.symbol_class().rho);
  if (r0 >= diameter(grid->backend(), grid->torus_dim())) return 0.0;

  const CutoffProfile phi = build_cutoff();
  const Symbol s = dyadic_reconstruction(sigma, options.t_cap_factor * max_weight(duals), phi);
  const GroupPoint e = GroupPoint::identity(grid->backend(), grid->torus_dim());
  // With u = z^-1 x: K(x, z) = r(u) and K(x, y) = r(w u), w = y^-1 z; u -> r(w u) has coefficients r^(zeta) zeta(w).
  const FourierCoefficients a = symbol_table(s, e, duals);
  const GroupPoint w = compose(inverse(y), z);
  const auto zw = evaluate_all(duals, w);
  FourierCoefficients b(a.cutoff());
  for (std::size_t k = 0; k < duals.size(); ++k) b.set(duals[k], a.at(k) * zw[k]);
  const GridFunction r = inverse_on_grid(a, grid);
  const GridFunction rw = inverse_on_grid(b, grid);

  const double h = grid->spacing();
  double total = 0.0;
  for (std::size_t n = 0; n < grid->size(); ++n) {
    const double d = norm(grid->node(n));
    const double mask = options.smooth_boundary ? std::clamp((d - r0) / h + 0.5, 0.0, 1.0) : (d >= r0 ? 1.0 : 0.0);
    if (mask > 0.0) total += mask * grid->weight(n) * std::abs(rw[n] - r[n]);
  }
  return total;
}

FourierCoefficients random_coefficients(const std::vector<Irrep>& duals, std::uint64_t seed, double decay) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  FourierCoefficients c(max_weight(duals));
  for (const auto& z : duals) {
    const int d = z.dimension();
    Eigen::MatrixXcd m(d, d);
    const double scale = std::pow(z.weight(), -decay);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = scale * cplx(g(rng), g(rng));
    c.set(z, std::move(m));
  }
  return c;
}

double operator_norm_estimate(const Symbol& sigma, double p, double q, const std::vector<Irrep>& duals,
                              std::shared_ptr<const QuadratureGrid> grid, int trials, std::uint64_t seed) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("exponents must lie in [1, infinity]");
  if (p == 2.0 && q == 2.0) {
    if (sigma.x_independent()) {
      // Op(sigma) is block diagonal in the Peter-Weyl decomposition.
      double best = 0.0;
      for (const auto& z : duals) {
        const Eigen::MatrixXcd m = sigma(z);
        best = std::max(best, m.rows() == 1 ? std::abs(m(0, 0)) : Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0));
      }
      return best;
    }
    FourierCoefficients v = random_coefficients(duals, seed, 0.0);
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
      const double nv = coefficient_norm(v);
      if (nv == 0.0) return 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) v.at(k) /= nv;
      const GridFunction av = quantize_apply(sigma, inverse_on_grid(v, grid), duals);
      v = adjoint_apply(sigma, av, duals);
      const double next = coefficient_norm(v);
      const bool done = it > 0 && std::abs(next - lambda) <= 1e-8 * std::max(next, 1e-300);
      lambda = next;
      if (done) break;
    }
    return std::sqrt(lambda);
  }
  double best = 0.0;
  for (int k = 0; k < trials; ++k) {
    const GridFunction f = inverse_on_grid(random_coefficients(duals, seed + static_cast<std::uint64_t>(k)), grid);
    const double nf = lp_norm(f, p);
    if (nf == 0.0) continue;
    best = std::max(best, lp_norm(quantize_apply(sigma, f, duals), q) / nf);
  }
  return best;
}

}  // namespace lgpdo
