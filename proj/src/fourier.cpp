#include "lgpdo/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace lgpdo {

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.grid_ptr() != b.grid_ptr() && a.size() != b.size())
    throw std::invalid_argument("grid functions live on different grids");
}

void warn_if_unresolved(const QuadratureGrid& grid, const std::vector<Irrep>& duals) {
  if (!grid_resolves(grid, duals))
    std::clog << "warning: grid of resolution " << grid.resolution()
              << " does not integrate the requested irreps exactly; coefficients are aliased\n";
}

// Phase table e^{i mu theta_a} for doubled weights 2mu = k - T, k = 0..2T.
Eigen::MatrixXcd phase_table(int count, double period, int two_spin_max) {
  const int K = 2 * two_spin_max + 1;
  Eigen::MatrixXcd p(count, K);
  for (int a = 0; a < count; ++a) {
    const double theta = period * a / count;
    for (int k = 0; k < K; ++k) p(a, k) = std::polar(1.0, 0.5 * (k - two_spin_max) * theta);
  }
  return p;
}

bool has_euler_layout(const QuadratureGrid& grid) {
  return grid.backend() == Backend::SU2 && grid.euler() != nullptr;
}

FourierCoefficients forward_euler(const GridFunction& f, const std::vector<Irrep>& duals) {
  const QuadratureGrid& grid = f.grid();
  const EulerLayout& E = *grid.euler();
  const int T = max_two_spin(duals);
  const Eigen::MatrixXcd pa = phase_table(E.n_alpha, 2.0 * std::numbers::pi, T);
  const Eigen::MatrixXcd pg = phase_table(E.n_gamma, 4.0 * std::numbers::pi, T);
  const double inv_ag = 1.0 / (static_cast<double>(E.n_alpha) * E.n_gamma);

  FourierCoefficients out = FourierCoefficients::zeros(duals, max_weight(duals));
  const std::size_t slab = static_cast<std::size_t>(E.n_alpha) * E.n_gamma;
  for (int b = 0; b < E.n_beta; ++b) {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slice(
        f.values().data() + b * slab, E.n_alpha, E.n_gamma);
    // F(mu, nu) = sum_{a,c} f e^{i mu alpha_a} e^{i nu gamma_c} / (n_alpha n_gamma)
    const Eigen::MatrixXcd F = pa.transpose() * (slice * pg);
    const auto d = wigner_small_d_table(T, E.beta[static_cast<std::size_t>(b)]);
    const double wb = E.beta_weight[static_cast<std::size_t>(b)] * inv_ag;
    for (std::size_t z = 0; z < duals.size(); ++z) {
      const int t = duals[z].label().two_spin;
      const auto& dt = d[static_cast<std::size_t>(t)];
      Eigen::MatrixXcd& block = out.at(z);
      // conj(zeta(x))_{ji} = d_{ji} e^{i m_j alpha} e^{i m_i gamma}
      for (int i = 0; i <= t; ++i)
        for (int j = 0; j <= t; ++j) block(i, j) += wb * dt(j, i) * F(t - 2 * j + T, t - 2 * i + T);
    }
  }
  return out;
}

GridFunction inverse_euler(const FourierCoefficients& coeffs, std::shared_ptr<const QuadratureGrid> grid) {
  const EulerLayout& E = *grid->euler();
  const int T = max_two_spin(coeffs.irreps());
  const int K = 2 * T + 1;
  const Eigen::MatrixXcd pa = phase_table(E.n_alpha, 2.0 * std::numbers::pi, T).conjugate();
  const Eigen::MatrixXcd pg_t = phase_table(E.n_gamma, 4.0 * std::numbers::pi, T).adjoint();

  std::vector<cplx> values(grid->size());
  const std::size_t slab = static_cast<std::size_t>(E.n_alpha) * E.n_gamma;
  for (int b = 0; b < E.n_beta; ++b) {
    const auto d = wigner_small_d_table(T, E.beta[static_cast<std::size_t>(b)]);
    // G(mu, nu) = sum_l d_l d^l_{mu nu}(beta) A^l_{nu mu}
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(K, K);
    for (std::size_t z = 0; z < coeffs.size(); ++z) {
      const int t = coeffs.irreps()[z].label().two_spin;
      const auto& dt = d[static_cast<std::size_t>(t)];
      const Eigen::MatrixXcd& A = coeffs.at(z);
      for (int i = 0; i <= t; ++i)
        for (int j = 0; j <= t; ++j) G(t - 2 * i + T, t - 2 * j + T) += static_cast<double>(t + 1) * dt(i, j) * A(j, i);
    }
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slice(values.data() + b * slab,
                                                                                         E.n_alpha, E.n_gamma);
    slice = pa * G * pg_t;
  }
  return GridFunction(std::move(grid), std::move(values));
}

}  // namespace

GridFunction::GridFunction(std::shared_ptr<const QuadratureGrid> grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("grid function needs a grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("value count does not match the grid");
}

GridFunction GridFunction::zeros(std::shared_ptr<const QuadratureGrid> grid) { return constant(std::move(grid), 0.0); }

GridFunction GridFunction::constant(std::shared_ptr<const QuadratureGrid> grid, cplx c) {
  const std::size_t n = grid->size();
  return GridFunction(std::move(grid), std::vector<cplx>(n, c));
}

GridFunction GridFunction::sample(std::shared_ptr<const QuadratureGrid> grid,
                                  const std::function<cplx(const GroupPoint&)>& f) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return GridFunction(std::move(grid), std::move(v));
}

cplx GridFunction::integral() const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_->weight(i) * values_[i];
  return s;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, cplx s) { return a *= s; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

GridFunction multiply(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

FourierCoefficients FourierCoefficients::zeros(const std::vector<Irrep>& duals, double cutoff) {
  FourierCoefficients c(cutoff);
  for (const auto& z : duals) c.set(z, Eigen::MatrixXcd::Zero(z.dimension(), z.dimension()));
  return c;
}

void FourierCoefficients::set(const Irrep& irrep, Eigen::MatrixXcd block) {
  if (block.rows() != irrep.dimension() || block.cols() != irrep.dimension())
    throw std::invalid_argument("coefficient block does not match the irrep dimension");
  if (auto it = index_.find(irrep.label()); it != index_.end()) {
    blocks_[it->second] = std::move(block);
    return;
  }
  index_.emplace(irrep.label(), irreps_.size());
  irreps_.push_back(irrep);
  blocks_.push_back(std::move(block));
  cutoff_ = std::max(cutoff_, irrep.weight());
}

const Eigen::MatrixXcd* FourierCoefficients::find(const IrrepLabel& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? nullptr : &blocks_[it->second];
}

double max_weight(const std::vector<Irrep>& duals) {
  double w = 1.0;
  for (const auto& z : duals) w = std::max(w, z.weight());
  return w;
}

bool grid_resolves(const QuadratureGrid& grid, const std::vector<Irrep>& duals) {
  if (grid.backend() == Backend::SU2) return max_two_spin(duals) <= grid.exactness_degree();
  int kmax = 0;
  for (const auto& z : duals)
    for (int k : z.label().frequency) kmax = std::max(kmax, std::abs(k));
  return 2 * kmax <= grid.exactness_degree();
}

FourierCoefficients forward(const GridFunction& f, const std::vector<Irrep>& duals) {
  warn_if_unresolved(f.grid(), duals);
  if (has_euler_layout(f.grid())) return forward_euler(f, duals);
  return forward_direct(f, duals);
}

FourierCoefficients forward_direct(const GridFunction& f, const std::vector<Irrep>& duals) {
  FourierCoefficients out = FourierCoefficients::zeros(duals, max_weight(duals));
  const QuadratureGrid& grid = f.grid();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const cplx fw = grid.weight(n) * f[n];
    if (fw == 0.0) continue;
    const auto mats = evaluate_all(duals, grid.node(n));
    for (std::size_t z = 0; z < duals.size(); ++z) out.at(z) += fw * mats[z].adjoint();
  }
  return out;
}

cplx inverse(const FourierCoefficients& coeffs, const GroupPoint& x) {
  const auto mats = evaluate_all(coeffs.irreps(), x);
  cplx s = 0.0;
  for (std::size_t z = 0; z < coeffs.size(); ++z)
    s += static_cast<double>(coeffs.irreps()[z].dimension()) * (mats[z].transpose().cwiseProduct(coeffs.at(z))).sum();
  return s;
}

GridFunction inverse_on_grid(const FourierCoefficients& coeffs, std::shared_ptr<const QuadratureGrid> grid) {
  if (has_euler_layout(*grid) && coeffs.size() > 0) return inverse_euler(coeffs, std::move(grid));
  return inverse_on_grid_direct(coeffs, std::move(grid));
}

GridFunction inverse_on_grid_direct(const FourierCoefficients& coeffs, std::shared_ptr<const QuadratureGrid> grid) {
  std::vector<cplx> v(grid->size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = inverse(coeffs, grid->node(n));
  return GridFunction(std::move(grid), std::move(v));
}

double spectral_l2_norm(const FourierCoefficients& coeffs) {
  double s = 0.0;
  for (std::size_t z = 0; z < coeffs.size(); ++z)
    s += coeffs.irreps()[z].dimension() * coeffs.at(z).squaredNorm();
  return std::sqrt(s);
}

nlohmann::json coefficients_to_json(const FourierCoefficients& coeffs) {
  nlohmann::json j;
  j["version"] = 1;
  j["cutoff"] = coeffs.cutoff();
  auto& entries = j["entries"] = nlohmann::json::array();
  for (std::size_t z = 0; z < coeffs.size(); ++z) {
    const auto& label = coeffs.irreps()[z].label();
    nlohmann::json e;
    e["backend"] = to_string(label.backend);
    if (label.backend == Backend::SU2)
      e["two_spin"] = label.two_spin;
    else
      e["frequency"] = label.frequency;
    const auto& m = coeffs.at(z);
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        re.push_back(m(r, c).real());
        im.push_back(m(r, c).imag());
      }
    e["re"] = re;
    e["im"] = im;
    entries.push_back(std::move(e));
  }
  return j;
}

FourierCoefficients coefficients_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported coefficient format version");
  FourierCoefficients out(j.at("cutoff").get<double>());
  for (const auto& e : j.at("entries")) {
    const Backend backend = backend_from_string(e.at("backend").get<std::string>());
    const Irrep z(backend == Backend::SU2 ? IrrepLabel::spin(e.at("two_spin").get<int>())
                                          : IrrepLabel::torus(e.at("frequency").get<std::vector<int>>()));
    const auto re = e.at("re").get<std::vector<double>>();
    const auto im = e.at("im").get<std::vector<double>>();
    const int d = z.dimension();
    if (re.size() != static_cast<std::size_t>(d * d) || im.size() != re.size())
      throw std::invalid_argument("coefficient block has the wrong size");
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = cplx(re[static_cast<std::size_t>(r * d + c)], im[static_cast<std::size_t>(r * d + c)]);
    out.set(z, std::move(m));
  }
  return out;
}

}  // namespace lgpdo
