#include "lgpdo/function_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lgpdo {

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("Lp norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().weight(i) * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

double weak_l1_quasinorm(const GridFunction& f) {
  std::vector<std::pair<double, double>> vw(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vw[i] = {std::abs(f[i]), f.grid().weight(i)};
  std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  // As alpha increases to a value v, the set {|f| > alpha} keeps every node with |f_i| >= v.
  double best = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < vw.size();) {
    const double v = vw[i].first;
    if (v == 0.0) break;
    for (; i < vw.size() && vw[i].first == v; ++i) mass += vw[i].second;
    best = std::max(best, v * mass);
  }
  return best;
}

cplx ball_average(const GridFunction& f, const Ball& ball) {
  cplx s = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (ball.contains(f.grid().node(i))) {
      s += f.grid().weight(i) * f[i];
      m += f.grid().weight(i);
    }
  return m > 0.0 ? s / m : cplx(0.0);
}

double mean_oscillation(const GridFunction& f, const Ball& ball) {
  std::vector<std::size_t> inside;
  double m = 0.0;
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (ball.contains(f.grid().node(i))) {
      inside.push_back(i);
      m += f.grid().weight(i);
      s += f.grid().weight(i) * f[i];
    }
  if (m <= 0.0) return 0.0;
  const cplx avg = s / m;
  double osc = 0.0;
  for (std::size_t i : inside) osc += f.grid().weight(i) * std::abs(f[i] - avg);
  return osc / m;
}

std::vector<Ball> ball_sample(std::span<const GroupPoint> centers, std::span<const double> radii) {
  std::vector<Ball> out;
  out.reserve(centers.size() * radii.size());
  for (const auto& c : centers)
    for (double r : radii) out.push_back(Ball{c, r});
  return out;
}

std::vector<double> log_spaced(double r_min, double r_max, int count) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || count < 1) throw std::invalid_argument("bad log-spaced range");
  std::vector<double> r(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    r[static_cast<std::size_t>(k)] = count == 1 ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(k) / (count - 1));
  r.back() = r_max;
  return r;
}

std::vector<GroupPoint> center_subsample(const QuadratureGrid& grid, std::size_t count) {
  std::vector<GroupPoint> out;
  if (count == 0) return out;
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / count);
  // An odd offset walks through the product grid without locking onto one Euler slab.
  for (std::size_t k = 0; k < count && k < grid.size(); ++k) out.push_back(grid.node((k * stride + k) % grid.size()));
  return out;
}

GridFunction maximal_function(const GridFunction& f, std::span<const double> radii, std::span<const GroupPoint> centers) {
  if (radii.empty()) throw std::invalid_argument("maximal function needs at least one radius");
  const QuadratureGrid& grid = f.grid();
  std::vector<GroupPoint> own;
  if (centers.empty()) {
    own = grid.nodes();
    centers = own;
  }
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> best(f.size(), 0.0);
  std::vector<std::pair<double, std::size_t>> order(f.size());
  for (const auto& c : centers) {
    for (std::size_t i = 0; i < f.size(); ++i) order[i] = {geodesic_distance(c, grid.node(i)), i};
    std::sort(order.begin(), order.end());
    // Cumulative sums over nodes sorted by distance give every radius in one pass.
    std::size_t pos = 0;
    double mass = 0.0, integral = 0.0;
    for (double r : sorted) {
      while (pos < order.size() && order[pos].first < r) {
        const std::size_t i = order[pos].second;
        mass += grid.weight(i);
        integral += grid.weight(i) * std::abs(f[i]);
        ++pos;
      }
      if (mass <= 0.0) continue;
      const double avg = integral / mass;
      for (std::size_t k = 0; k < pos; ++k) {
        double& b = best[order[k].second];
        b = std::max(b, avg);
      }
    }
  }
  std::vector<cplx> v(best.begin(), best.end());
  return GridFunction(f.grid_ptr(), std::move(v));
}

std::vector<double> bmo_seminorms(std::span<const GridFunction> fs, std::span<const Ball> balls) {
  std::vector<double> best(fs.size(), 0.0);
  if (fs.empty()) return best;
  const QuadratureGrid& grid = fs.front().grid();
  for (const auto& f : fs)
    if (f.size() != grid.size()) throw std::invalid_argument("functions must share one grid");
  const std::size_t n = grid.size();
  std::vector<std::pair<double, std::size_t>> order(n);
  std::vector<double> cum_mass(n + 1), dist(n), w(n);
  std::vector<cplx> cum_int(n + 1), v(n);
  // Balls sharing a centre reuse one sorted distance table.
  for (std::size_t b = 0; b < balls.size();) {
    const GroupPoint& c = balls[b].center;
    for (std::size_t i = 0; i < n; ++i) order[i] = {geodesic_distance(c, grid.node(i)), i};
    std::sort(order.begin(), order.end());
    for (std::size_t k = 0; k < n; ++k) {
      dist[k] = order[k].first;
      w[k] = grid.weight(order[k].second);
      cum_mass[k + 1] = cum_mass[k] + w[k];
    }
    const std::size_t first = b;
    while (b < balls.size() && balls[b].center == c) ++b;
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = fs[fi][order[k].second];
        cum_int[k + 1] = cum_int[k] + w[k] * v[k];
      }
      for (std::size_t bi = first; bi < b; ++bi) {
        const auto m = static_cast<std::size_t>(std::lower_bound(dist.begin(), dist.end(), balls[bi].radius) - dist.begin());
        if (cum_mass[m] <= 0.0) continue;
        const cplx avg = cum_int[m] / cum_mass[m];
        double osc = 0.0;
        // sqrt(norm) rather than abs: hypot dominates the inner loop otherwise.
        for (std::size_t k = 0; k < m; ++k) osc += w[k] * std::sqrt(std::norm(v[k] - avg));
        best[fi] = std::max(best[fi], osc / cum_mass[m]);
      }
    }
  }
  return best;
}

double bmo_seminorm(const GridFunction& f, std::span<const Ball> balls) {
  return bmo_seminorms(std::span<const GridFunction>(&f, 1), balls).front();
}

Atom make_atom(std::shared_ptr<const QuadratureGrid> grid, const GroupPoint& z, double radius, std::uint64_t seed) {
  const double diam = diameter(grid->backend(), grid->torus_dim());
  if (!(radius > 0.0) || radius > diam) throw std::invalid_argument("atom radius must lie in (0, diameter]");
  const Ball ball{z, radius};
  std::vector<std::size_t> inside;
  double mass = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (ball.contains(grid->node(i))) {
      inside.push_back(i);
      mass += grid->weight(i);
    }
  if (inside.size() < 2 || mass <= 0.0) throw std::domain_error("atom ball holds fewer than two grid nodes");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  const int dim = z.dimension();
  struct Wave {
    std::vector<double> k;
    double amp;
    double phase;
  };
  std::vector<Wave> waves(4);
  for (auto& w : waves) {
    w.k.resize(static_cast<std::size_t>(dim));
    double n = 0.0;
    for (double& c : w.k) {
      c = gauss(rng);
      n += c * c;
    }
    const double freq = (0.5 + 1.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng)) * std::numbers::pi / radius;
    for (double& c : w.k) c *= freq / std::sqrt(n);
    w.amp = gauss(rng);
    w.phase = unif(rng);
  }

  const GroupPoint zinv = inverse(z);
  std::vector<cplx> values(grid->size(), 0.0);
  cplx mean = 0.0;
  for (std::size_t i : inside) {
    const auto v = log_map(compose(zinv, grid->node(i)));
    double s = 0.0;
    for (const auto& w : waves) {
      double dot = 0.0;
      for (std::size_t c = 0; c < v.size(); ++c) dot += w.k[c] * v[c];
      s += w.amp * std::cos(dot + w.phase);
    }
    values[i] = s;
    mean += grid->weight(i) * s;
  }
  mean /= mass;
  double sup = 0.0;
  for (std::size_t i : inside) {
    values[i] -= mean;
    sup = std::max(sup, std::abs(values[i]));
  }
  if (!(sup > 0.0)) throw std::domain_error("atom profile is constant on the ball");
  const double scale = (1.0 / mass) / sup;
  for (std::size_t i : inside) values[i] *= scale;
  return Atom{ball, mass, GridFunction(std::move(grid), std::move(values))};
}

CZBounds cz_bounds(const CellTree& tree) {
  return CZBounds{tree.mass_ratio(), 1.0, 2.0 * tree.mass_ratio(), tree.ball_ratio(), 2.0, tree.overlap_bound()};
}

CZDecomposition cz_decompose(const GridFunction& f, double level, const CellTree& tree) {
  if (f.grid_ptr() != tree.grid_ptr() && f.size() != tree.grid().size())
    throw std::invalid_argument("function and cell tree use different grids");
  const QuadratureGrid& grid = f.grid();
  double f_l1 = 0.0;
  std::vector<double> absf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    absf[i] = std::abs(f[i]);
    f_l1 += grid.weight(i) * absf[i];
  }
  const double total = tree.cell(tree.root()).mass;
  if (!(level > f_l1 / total))
    throw std::invalid_argument("decomposition level must exceed the mean of |f|; below it the weak (1,1) bound is trivial");

  CZDecomposition out{f, {}, level, tree.overlap_bound(), {}};
  std::vector<std::size_t> stack(tree.cell(tree.root()).children.rbegin(), tree.cell(tree.root()).children.rend());
  while (!stack.empty()) {
    const std::size_t ci = stack.back();
    stack.pop_back();
    const Cell& c = tree.cell(ci);
    double integral = 0.0;
    cplx avg = 0.0;
    for (std::size_t i : c.nodes) {
      integral += grid.weight(i) * absf[i];
      avg += grid.weight(i) * f[i];
    }
    if (integral / c.mass > level) {
      avg /= c.mass;
      GridFunction b = GridFunction::zeros(f.grid_ptr());
      for (std::size_t i : c.nodes) {
        b[i] = f[i] - avg;
        out.good[i] = avg;
      }
      out.bad.push_back(BadPart{std::move(b), ci, c.ball, c.ball_mass});
      continue;
    }
    for (auto it = c.children.rbegin(); it != c.children.rend(); ++it) stack.push_back(*it);
  }

  CZConstants& k = out.measured;
  k.good_sup = lp_norm(out.good, std::numeric_limits<double>::infinity()) / level;
  k.good_l1 = f_l1 > 0.0 ? lp_norm(out.good, 1.0) / f_l1 : 0.0;
  std::vector<int> count(f.size(), 0);
  double ball_sum = 0.0, bad_sum = 0.0;
  for (const auto& p : out.bad) {
    const double l1 = lp_norm(p.b, 1.0);
    k.bad_mean = std::max(k.bad_mean, std::abs(p.b.integral()));
    k.bad_l1 = std::max(k.bad_l1, l1 / (level * p.ball_mass));
    ball_sum += p.ball_mass;
    bad_sum += l1;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (p.ball.contains(grid.node(i))) ++count[i];
  }
  k.ball_sum = f_l1 > 0.0 ? ball_sum * level / f_l1 : 0.0;
  k.bad_total = f_l1 > 0.0 ? bad_sum / f_l1 : 0.0;
  k.overlap = count.empty() ? 0 : *std::max_element(count.begin(), count.end());
  return out;
}

bool cz_properties_hold(const CZDecomposition& d, const CZBounds& bounds, double mean_tol) {
  const double slack = 1.0 + 1e-12;
  const auto& k = d.measured;
  if (k.good_sup > bounds.good_sup * slack || k.good_l1 > bounds.good_l1 * slack) return false;  // (1)
  for (const auto& p : d.bad) {                                                                // (2)
    if (std::abs(p.b.integral()) > mean_tol) return false;
    for (std::size_t i = 0; i < p.b.size(); ++i)
      if (p.b[i] != 0.0 && !p.ball.contains(p.b.grid().node(i))) return false;
  }
  if (k.bad_l1 > bounds.bad_l1 * slack) return false;        // (3)
  if (k.ball_sum > bounds.ball_sum * slack) return false;    // (4)
  if (k.bad_total > bounds.bad_total * slack) return false;  // (5)
  return k.overlap <= bounds.overlap;                        // (6)
}

nlohmann::json atom_to_json(const Atom& a) {
  nlohmann::json j;
  j["radius"] = a.ball.radius;
  j["ball_mass"] = a.ball_mass;
  if (a.ball.center.backend() == Backend::SU2)
    j["center"] = a.ball.center.quaternion();
  else
    j["center"] = std::vector<double>(a.ball.center.angles().begin(), a.ball.center.angles().end());
  nlohmann::json vals = nlohmann::json::array();
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] != 0.0) vals.push_back({i, a.values[i].real(), a.values[i].imag()});
  j["values"] = std::move(vals);
  return j;
}

nlohmann::json cz_to_json(const CZDecomposition& d) {
  nlohmann::json j;
  j["level"] = d.level;
  j["overlap_bound"] = d.overlap_bound;
  j["bad_parts"] = d.bad.size();
  const auto& k = d.measured;
  j["measured"] = {{"good_sup", k.good_sup}, {"good_l1", k.good_l1}, {"bad_mean", k.bad_mean},
                   {"bad_l1", k.bad_l1},     {"ball_sum", k.ball_sum}, {"bad_total", k.bad_total},
                   {"overlap", k.overlap}};
  nlohmann::json balls = nlohmann::json::array();
  for (const auto& p : d.bad) balls.push_back({{"cell", p.cell}, {"radius", p.ball.radius}, {"mass", p.ball_mass}});
  j["balls"] = std::move(balls);
  return j;
}

}  // namespace lgpdo
