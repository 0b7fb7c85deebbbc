#include "lgpdo/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace lgpdo {

namespace {

void require_su2(const Irrep& z) {
  if (z.label().backend != Backend::SU2) throw std::invalid_argument("subelliptic symbols are defined on SU(2) only");
}

Symbol diagonal_multiplier(std::function<cplx(const Irrep&, double m)> entry, SymbolClass cls,
                           nlohmann::json descriptor) {
  return multiplier_symbol(
      [entry = std::move(entry)](const Irrep& z, int i, int j) -> cplx {
        require_su2(z);
        return i == j ? entry(z, z.m(i)) : cplx(0.0);
      },
      cls, std::move(descriptor));
}

FourierCoefficients tabulate(const Symbol& sigma, const GroupPoint& x, const std::vector<Irrep>& duals) {
  FourierCoefficients c(max_weight(duals));
  for (const auto& z : duals) c.set(z, sigma(x, z));
  return c;
}

// Delta_q applied to sigma(x, .) for one base point.
FourierCoefficients difference_table(const std::function<cplx(const GroupPoint&)>& q, const Symbol& sigma,
                                     const GroupPoint& x, const std::vector<Irrep>& duals,
                                     const std::vector<Irrep>& input, const std::shared_ptr<const QuadratureGrid>& grid) {
  const GridFunction r = inverse_on_grid(tabulate(sigma, x, input), grid);
  const GridFunction qr = multiply(r, GridFunction::sample(grid, q));
  return forward(qr, duals);
}

std::vector<GroupPoint> default_base_points(Backend backend, int torus_dim) {
  std::vector<GroupPoint> pts{GroupPoint::identity(backend, torus_dim)};
  const auto grid = haar_grid(backend, 4, torus_dim);
  const std::size_t stride = std::max<std::size_t>(1, grid->size() / 16);
  for (std::size_t i = 0; i < grid->size() && pts.size() < 17; i += stride) pts.push_back(grid->node(i));
  return pts;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.isDiagonal(0.0)) return m.diagonal().cwiseAbs().maxCoeff();
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

}  // namespace

Symbol::Symbol(Eval eval, SymbolClass cls, bool x_independent, nlohmann::json descriptor)
    : eval_(std::make_shared<const Eval>(std::move(eval))),
      cls_(cls),
      x_independent_(x_independent),
      descriptor_(std::move(descriptor)) {
  if (!(cls.rho > 0.0 && cls.rho <= 1.0 && cls.delta >= 0.0 && cls.delta < 1.0 && cls.delta <= cls.rho))
    throw std::invalid_argument("symbol class needs 0 <= delta <= rho <= 1, rho > 0, delta < 1");
  descriptor_["m"] = cls.m;
  descriptor_["rho"] = cls.rho;
  descriptor_["delta"] = cls.delta;
}

Eigen::MatrixXcd Symbol::operator()(const GroupPoint& x, const Irrep& z) const {
  Eigen::MatrixXcd m = (*eval_)(x, z);
  if (m.rows() != z.dimension() || m.cols() != z.dimension())
    throw std::logic_error("symbol returned a block of the wrong size");
  return m;
}

Eigen::MatrixXcd Symbol::operator()(const Irrep& z) const {
  if (!x_independent_) throw std::logic_error("symbol depends on the base point");
  return (*this)(GroupPoint::identity(z.label().backend, std::max<int>(1, static_cast<int>(z.label().frequency.size()))), z);
}

Symbol Symbol::with_class(SymbolClass cls) const { return Symbol(*eval_, cls, x_independent_, descriptor_); }

Symbol Symbol::with_descriptor(nlohmann::json d) const { return Symbol(*eval_, cls_, x_independent_, std::move(d)); }

Symbol multiplier_symbol(std::function<cplx(const Irrep&, int, int)> entry, SymbolClass cls, nlohmann::json descriptor) {
  return Symbol(
      [entry = std::move(entry)](const GroupPoint&, const Irrep& z) {
        const int d = z.dimension();
        Eigen::MatrixXcd m(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) m(i, j) = entry(z, i, j);
        return m;
      },
      cls, true, std::move(descriptor));
}

Symbol scalar_multiplier(std::function<cplx(const Irrep&)> s, SymbolClass cls, nlohmann::json descriptor) {
  return Symbol(
      [s = std::move(s)](const GroupPoint&, const Irrep& z) -> Eigen::MatrixXcd {
        return s(z) * Eigen::MatrixXcd::Identity(z.dimension(), z.dimension());
      },
      cls, true, std::move(descriptor));
}

Symbol identity_symbol() {
  return scalar_multiplier([](const Irrep&) { return cplx(1.0); }, {0.0, 1.0, 0.0}, {{"kind", "identity"}});
}

Symbol zero_symbol() {
  return scalar_multiplier([](const Irrep&) { return cplx(0.0); }, {0.0, 1.0, 0.0}, {{"kind", "zero"}});
}

Symbol bessel_symbol(double beta) {
  return scalar_multiplier([beta](const Irrep& z) { return cplx(std::pow(z.weight(), beta)); }, {beta, 1.0, 0.0},
                           {{"kind", "bessel"}, {"beta", beta}});
}

Symbol table_symbol(const FourierCoefficients& blocks, SymbolClass cls, nlohmann::json descriptor) {
  auto table = std::make_shared<const FourierCoefficients>(blocks);
  return Symbol(
      [table](const GroupPoint&, const Irrep& z) -> Eigen::MatrixXcd {
        const Eigen::MatrixXcd* m = table->find(z.label());
        if (!m) throw std::out_of_range("symbol table has no entry for " + to_string(z.label()));
        return *m;
      },
      cls, true, std::move(descriptor));
}

Symbol product(const Symbol& a, const Symbol& b) {
  const SymbolClass ca = a.symbol_class(), cb = b.symbol_class();
  const SymbolClass c{ca.m + cb.m, std::min(ca.rho, cb.rho), std::max(ca.delta, cb.delta)};
  return Symbol([a, b](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd { return a(x, z) * b(x, z); }, c,
                a.x_independent() && b.x_independent(),
                {{"kind", "product"}, {"left", a.descriptor()}, {"right", b.descriptor()}});
}

Symbol scale_by_function(const Symbol& s, std::function<cplx(const GroupPoint&)> phi) {
  return Symbol([s, phi = std::move(phi)](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd { return phi(x) * s(x, z); },
                s.symbol_class(), false, {{"kind", "scaled"}, {"inner", s.descriptor()}});
}

DifferenceFamily DifferenceFamily::standard(Backend backend, int torus_dim) {
  DifferenceFamily f;
  f.backend = backend;
  f.torus_dim = torus_dim;
  if (backend == Backend::SU2) {
    const Irrep half(IrrepLabel::spin(1));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        f.members.push_back([half, i, j](const GroupPoint& x) -> cplx {
          return evaluate(half, x)(i, j) - (i == j ? 1.0 : 0.0);
        });
        f.names.push_back("q" + std::to_string(i + 1) + std::to_string(j + 1));
      }
    return f;
  }
  for (int k = 0; k < torus_dim; ++k) {
    f.members.push_back([k](const GroupPoint& x) -> cplx {
      return std::polar(1.0, x.angles()[static_cast<std::size_t>(k)]) - 1.0;
    });
    f.names.push_back("q" + std::to_string(k + 1));
  }
  return f;
}

double DifferenceFamily::magnitude(const GroupPoint& x) const {
  double m = 0.0;
  for (const auto& q : members) m = std::max(m, std::abs(q(x)));
  return m;
}

std::vector<Irrep> extend_duals(const std::vector<Irrep>& duals, int steps) {
  if (duals.empty() || steps <= 0) return duals;
  if (duals.front().label().backend == Backend::SU2) {
    std::vector<Irrep> out;
    const int t = max_two_spin(duals) + steps;
    for (int s = 0; s <= t; ++s) out.emplace_back(IrrepLabel::spin(s));
    return out;
  }
  std::set<IrrepLabel> labels;
  for (const auto& z : duals) labels.insert(z.label());
  for (int s = 0; s < steps; ++s) {
    std::set<IrrepLabel> next = labels;
    for (const auto& l : labels)
      for (std::size_t k = 0; k < l.frequency.size(); ++k)
        for (int sign : {-1, 1}) {
          auto f = l.frequency;
          f[k] += sign;
          next.insert(IrrepLabel::torus(std::move(f)));
        }
    labels = std::move(next);
  }
  std::vector<Irrep> out;
  for (const auto& l : labels) out.emplace_back(l);
  std::stable_sort(out.begin(), out.end(), [](const Irrep& a, const Irrep& b) { return a.eigenvalue() < b.eigenvalue(); });
  return out;
}

std::shared_ptr<const QuadratureGrid> difference_grid(const std::vector<Irrep>& duals, int steps) {
  if (duals.empty()) throw std::invalid_argument("difference grid needs a nonempty dual set");
  const Backend backend = duals.front().label().backend;
  if (backend == Backend::SU2) {
    const int t = max_two_spin(duals);
    // kernel at spin (t + steps)/2, one factor q of spin 1/2, output at spin (t + steps - 1)/2
    return haar_grid(backend, resolution_for_total_spin(2 * (t + steps)));
  }
  int kmax = 0;
  for (const auto& z : duals)
    for (int k : z.label().frequency) kmax = std::max(kmax, std::abs(k));
  const int dim = static_cast<int>(duals.front().label().frequency.size());
  return haar_grid(backend, std::max(2, 2 * (kmax + steps) + 1), dim);
}

Symbol difference_apply(const std::function<cplx(const GroupPoint&)>& q, const Symbol& sigma,
                        const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid,
                        DifferenceWindow window) {
  if (!grid) grid = difference_grid(duals, 1);
  const std::vector<Irrep> input = window == DifferenceWindow::Extended ? extend_duals(duals, 1) : duals;
  SymbolClass cls = sigma.symbol_class();
  cls.m -= cls.rho;
  const nlohmann::json desc = {{"kind", "difference"}, {"inner", sigma.descriptor()}};
  if (sigma.x_independent()) {
    const GroupPoint e = GroupPoint::identity(grid->backend(), grid->torus_dim());
    return table_symbol(difference_table(q, sigma, e, duals, input, grid), cls, desc);
  }
  struct Cache {
    std::mutex mu;
    std::optional<GroupPoint> x;
    FourierCoefficients table;
  };
  auto cache = std::make_shared<Cache>();
  return Symbol(
      [q, sigma, duals, input, grid, cache](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd {
        std::lock_guard lock(cache->mu);
        if (!cache->x || !(*cache->x == x)) {
          cache->table = difference_table(q, sigma, x, duals, input, grid);
          cache->x = x;
        }
        const Eigen::MatrixXcd* m = cache->table.find(z.label());
        if (!m) throw std::out_of_range("difference symbol has no entry for " + to_string(z.label()));
        return *m;
      },
      cls, false, desc);
}

Symbol difference_apply_multi(const DifferenceFamily& family, std::span<const int> alpha, const Symbol& sigma,
                              const std::vector<Irrep>& duals, std::shared_ptr<const QuadratureGrid> grid) {
  const int order = static_cast<int>(alpha.size());
  if (order == 0) return sigma;
  for (int idx : alpha)
    if (idx < 0 || idx >= static_cast<int>(family.size())) throw std::out_of_range("difference index out of range");
  if (!grid) grid = difference_grid(duals, order);
  if (!sigma.x_independent()) {
    Symbol s = sigma;
    for (int k = order - 1; k >= 0; --k)
      s = difference_apply(family.members[static_cast<std::size_t>(alpha[static_cast<std::size_t>(k)])], s,
                           extend_duals(duals, k), grid);
    return s;
  }
  // The operators commute and compose to Delta_{q^alpha}: one kernel, one product, one transform.
  const std::vector<Irrep> input = extend_duals(duals, order);
  const GroupPoint e = GroupPoint::identity(grid->backend(), grid->torus_dim());
  GridFunction qr = inverse_on_grid(tabulate(sigma, e, input), grid);
  for (int idx : alpha) qr = multiply(qr, GridFunction::sample(grid, family.members[static_cast<std::size_t>(idx)]));
  SymbolClass cls = sigma.symbol_class();
  cls.m -= cls.rho * order;
  return table_symbol(forward(qr, duals), cls,
                      {{"kind", "difference"}, {"alpha", std::vector<int>(alpha.begin(), alpha.end())},
                       {"inner", sigma.descriptor()}});
}

std::vector<std::pair<std::vector<int>, Symbol>> difference_apply_all(const DifferenceFamily& family, int order,
                                                                      const Symbol& sigma,
                                                                      const std::vector<Irrep>& duals,
                                                                      std::shared_ptr<const QuadratureGrid> grid) {
  if (order < 0) throw std::invalid_argument("difference order must be nonnegative");
  if (!sigma.x_independent()) throw std::invalid_argument("batched differences need an x-independent symbol");
  if (!grid) grid = difference_grid(duals, order);
  const GroupPoint e = GroupPoint::identity(grid->backend(), grid->torus_dim());
  const GridFunction r = inverse_on_grid(tabulate(sigma, e, extend_duals(duals, order)), grid);
  std::vector<GridFunction> q;
  for (const auto& member : family.members) q.push_back(GridFunction::sample(grid, member));
  SymbolClass cls = sigma.symbol_class();
  cls.m -= cls.rho * order;

  std::vector<std::pair<std::vector<int>, Symbol>> out;
  std::vector<int> alpha;
  auto walk = [&](auto&& self, const GridFunction& acc, int lo) -> void {
    if (static_cast<int>(alpha.size()) == order) {
      out.emplace_back(alpha, table_symbol(forward(acc, duals), cls,
                                           {{"kind", "difference"}, {"alpha", alpha}, {"inner", sigma.descriptor()}}));
      return;
    }
    for (int k = lo; k < static_cast<int>(q.size()); ++k) {
      alpha.push_back(k);
      self(self, multiply(acc, q[static_cast<std::size_t>(k)]), k);
      alpha.pop_back();
    }
  };
  walk(walk, r, 0);
  return out;
}

Symbol base_derivative_apply(int direction, const Symbol& sigma, double h) {
  SymbolClass cls = sigma.symbol_class();
  cls.m += cls.delta;
  const nlohmann::json desc = {{"kind", "base_derivative"}, {"direction", direction}, {"inner", sigma.descriptor()}};
  if (sigma.x_independent())
    return Symbol([](const GroupPoint&, const Irrep& z) -> Eigen::MatrixXcd {
      return Eigen::MatrixXcd::Zero(z.dimension(), z.dimension());
    }, cls, true, desc);
  return Symbol(
      [direction, sigma, h](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd {
        const int n = x.dimension();
        if (direction < 0 || direction >= n) throw std::out_of_range("derivative direction out of range");
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        v[static_cast<std::size_t>(direction)] = h;
        const GroupPoint plus = compose(x, exp_map(v, x.backend()));
        v[static_cast<std::size_t>(direction)] = -h;
        const GroupPoint minus = compose(x, exp_map(v, x.backend()));
        return (sigma(plus, z) - sigma(minus, z)) / (2.0 * h);
      },
      cls, false, desc);
}

double seminorm_estimate(const Symbol& sigma, const DifferenceFamily& family, std::span<const int> alpha,
                         std::span<const int> beta, const std::vector<Irrep>& duals,
                         std::span<const GroupPoint> base_points) {
  Symbol s = sigma;
  for (auto it = beta.rbegin(); it != beta.rend(); ++it) s = base_derivative_apply(*it, s);
  s = difference_apply_multi(family, alpha, s, duals);

  std::vector<GroupPoint> pts;
  if (s.x_independent())
    pts.push_back(GroupPoint::identity(family.backend, family.torus_dim));
  else if (base_points.empty())
    pts = default_base_points(family.backend, family.torus_dim);
  else
    pts.assign(base_points.begin(), base_points.end());

  const SymbolClass c = sigma.symbol_class();
  const double order = c.m - c.rho * static_cast<double>(alpha.size()) + c.delta * static_cast<double>(beta.size());
  double best = 0.0;
  for (const auto& x : pts)
    for (const auto& z : duals) best = std::max(best, operator_norm(s(x, z)) / std::pow(z.weight(), order));
  return best;
}

double max_seminorm(const Symbol& sigma, const DifferenceFamily& family, int max_alpha, int max_beta,
                    const std::vector<Irrep>& duals, std::span<const GroupPoint> base_points) {
  if (sigma.x_independent()) {
    const SymbolClass c = sigma.symbol_class();
    double best = 0.0;
    for (int k = 0; k <= max_alpha; ++k)
      for (const auto& [alpha, d] : difference_apply_all(family, k, sigma, duals))
        for (const auto& z : duals)
          best = std::max(best, operator_norm(d(z)) / std::pow(z.weight(), c.m - c.rho * k));
    return best;
  }
  const int n_dirs = family.backend == Backend::SU2 ? 3 : family.torus_dim;
  // Difference operators of the family commute, so nondecreasing index sequences suffice.
  std::vector<std::vector<int>> alphas{{}};
  for (std::size_t start = 0; start < alphas.size(); ++start) {
    const auto a = alphas[start];
    if (static_cast<int>(a.size()) >= max_alpha) continue;
    for (int k = a.empty() ? 0 : a.back(); k < static_cast<int>(family.size()); ++k) {
      auto b = a;
      b.push_back(k);
      alphas.push_back(std::move(b));
    }
  }
  std::vector<std::vector<int>> betas{{}};
  if (!sigma.x_independent()) {
    for (std::size_t start = 0; start < betas.size(); ++start) {
      const auto a = betas[start];
      if (static_cast<int>(a.size()) >= max_beta) continue;
      for (int k = 0; k < n_dirs; ++k) {
        auto b = a;
        b.push_back(k);
        betas.push_back(std::move(b));
      }
    }
  }
  double best = 0.0;
  for (const auto& a : alphas)
    for (const auto& b : betas) best = std::max(best, seminorm_estimate(sigma, family, a, b, duals, base_points));
  return best;
}

namespace {

// Composite 30-point Gauss-Legendre on 8 panels: the cutoff is flat to all orders at both ends, so a fixed
// rule reaches ~1e-15 where adaptive error estimates stall and recurse to full depth.
template <typename F>
double panel_integral(F f, double a, double b) {
  constexpr int kPanels = 8;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i)
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, a + (b - a) * i / kPanels,
                                                                   a + (b - a) * (i + 1) / kPanels);
  return total;
}

}  // namespace

double CutoffProfile::operator()(double s) const {
  if (!(s > 0.5 && s < 1.0)) return 0.0;
  const double u = 4.0 * s - 3.0;
  return scale_ * std::exp(-p_ / (1.0 - u * u));
}

double CutoffProfile::tail_weight(double a) const {
  if (a >= 1.0) return 0.0;
  if (a <= 0.5) return 1.0;
  return panel_integral([this](double s) { return (*this)(s) / s; }, a, 1.0);
}

CutoffProfile build_cutoff(double smoothness) {
  if (!(smoothness > 0.0)) throw std::invalid_argument("cutoff smoothness must be positive");
  CutoffProfile phi;
  phi.p_ = smoothness;
  phi.scale_ = 1.0;
  const double mass = panel_integral([&phi](double s) { return phi(s) / s; }, 0.5, 1.0);
  phi.scale_ = 1.0 / mass;
  return phi;
}

Symbol dyadic_piece(const Symbol& sigma, double t, const CutoffProfile& phi) {
  if (!(t >= 1.0)) throw std::invalid_argument("dyadic parameter t must be at least 1");
  return Symbol([sigma, t, phi](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd {
    const double w = phi(z.weight() / t);
    if (w == 0.0) return Eigen::MatrixXcd::Zero(z.dimension(), z.dimension());
    return w * sigma(x, z);
  }, sigma.symbol_class(), sigma.x_independent(), {{"kind", "dyadic"}, {"t", t}, {"inner", sigma.descriptor()}});
}

Symbol dyadic_reconstruction(const Symbol& sigma, double T, const CutoffProfile& phi) {
  if (!(T >= 1.0)) throw std::invalid_argument("t-cap must be at least 1");
  return Symbol([sigma, T, phi](const GroupPoint& x, const Irrep& z) -> Eigen::MatrixXcd {
    return phi.tail_weight(z.weight() / T) * sigma(x, z);
  }, sigma.symbol_class(), sigma.x_independent(), {{"kind", "dyadic_sum"}, {"T", T}, {"inner", sigma.descriptor()}});
}

SubellipticSymbols subelliptic_symbols() {
  auto lsub = [](const Irrep& z, double m) { return z.eigenvalue() - m * m; };
  return SubellipticSymbols{
      scalar_multiplier([](const Irrep& z) { require_su2(z); return cplx(z.eigenvalue()); }, {2.0, 1.0, 0.0},
                        {{"kind", "laplacian"}}),
      diagonal_multiplier([](const Irrep&, double m) { return cplx(0.0, m); }, {1.0, 1.0, 0.0}, {{"kind", "Z"}}),
      diagonal_multiplier([lsub](const Irrep& z, double m) { return cplx(lsub(z, m)); }, {2.0, 1.0, 0.0},
                          {{"kind", "sub_laplacian"}}),
      diagonal_multiplier([lsub](const Irrep& z, double m) { return cplx(lsub(z, m), m); }, {2.0, 1.0, 0.0},
                          {{"kind", "heat"}}),
      diagonal_multiplier(
          [lsub](const Irrep& z, double m) { return z.label().two_spin == 0 ? cplx(0.0) : cplx(1.0 / lsub(z, m)); },
          {-1.0, 0.5, 0.0}, {{"kind", "parametrix_sub"}}),
      diagonal_multiplier(
          [lsub](const Irrep& z, double m) {
            return z.label().two_spin == 0 ? cplx(0.0) : 1.0 / cplx(lsub(z, m), m);
          },
          {-1.0, 0.5, 0.0}, {{"kind", "parametrix_heat"}}),
  };
}

Symbol test_operator_symbol() {
  return product(subelliptic_symbols().parametrix_sub, bessel_symbol(0.25))
      .with_class({-0.75, 0.5, 0.0})
      .with_descriptor({{"kind", "test_operator"}});
}

}  // namespace lgpdo
