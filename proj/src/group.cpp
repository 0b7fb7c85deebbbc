#include "lgpdo/group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gsl/gsl_integration.h>

namespace lgpdo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

void require_same_backend(const GroupPoint& a, const GroupPoint& b) {
  if (a.backend() != b.backend()) throw std::invalid_argument("group points live on different groups");
  if (a.backend() == Backend::Torus && a.angles().size() != b.angles().size())
    throw std::invalid_argument("torus points of different dimension");
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::SU2 ? "su2" : "torus"; }

Backend backend_from_string(const std::string& name) {
  if (name == "su2") return Backend::SU2;
  if (name == "torus") return Backend::Torus;
  throw std::invalid_argument("unknown group backend: " + name);
}

GroupPoint GroupPoint::identity(Backend backend, int torus_dim) {
  if (backend == Backend::SU2) return su2(1.0, 0.0, 0.0, 0.0);
  return torus(std::vector<double>(static_cast<std::size_t>(torus_dim), 0.0));
}

GroupPoint GroupPoint::su2(double q0, double q1, double q2, double q3) {
  const double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("quaternion must be nonzero and finite");
  GroupPoint p;
  p.backend_ = Backend::SU2;
  p.q_ = {q0 / n, q1 / n, q2 / n, q3 / n};
  return p;
}

GroupPoint GroupPoint::torus(std::vector<double> angles) {
  if (angles.empty()) throw std::invalid_argument("torus point needs at least one angle");
  GroupPoint p;
  p.backend_ = Backend::Torus;
  for (double& a : angles) a = wrap_angle(a);
  p.angles_ = std::move(angles);
  return p;
}

const Quaternion& GroupPoint::quaternion() const {
  if (backend_ != Backend::SU2) throw std::logic_error("quaternion() on a torus point");
  return q_;
}

std::span<const double> GroupPoint::angles() const {
  if (backend_ != Backend::Torus) throw std::logic_error("angles() on an SU(2) point");
  return angles_;
}

int GroupPoint::dimension() const {
  return backend_ == Backend::SU2 ? 3 : static_cast<int>(angles_.size());
}

GroupPoint compose(const GroupPoint& a, const GroupPoint& b) {
  require_same_backend(a, b);
  if (a.backend() == Backend::SU2) {
    const auto& p = a.quaternion();
    const auto& q = b.quaternion();
    return GroupPoint::su2(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
                           p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
                           p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
                           p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
  }
  std::vector<double> s(a.angles().begin(), a.angles().end());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] += b.angles()[k];
  return GroupPoint::torus(std::move(s));
}

GroupPoint inverse(const GroupPoint& a) {
  if (a.backend() == Backend::SU2) {
    const auto& q = a.quaternion();
    return GroupPoint::su2(q[0], -q[1], -q[2], -q[3]);
  }
  std::vector<double> s(a.angles().begin(), a.angles().end());
  for (double& x : s) x = -x;
  return GroupPoint::torus(std::move(s));
}

double geodesic_distance(const GroupPoint& a, const GroupPoint& b) {
  require_same_backend(a, b);
  if (a.backend() == Backend::SU2) {
    // Equal to arccos(<a,b>) but well conditioned near 0 and pi.
    const auto& p = a.quaternion();
    const auto& q = b.quaternion();
    double diff2 = 0.0, sum2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      diff2 += (p[k] - q[k]) * (p[k] - q[k]);
      sum2 += (p[k] + q[k]) * (p[k] + q[k]);
    }
    return 2.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.angles().size(); ++k) {
    double d = std::fabs(a.angles()[k] - b.angles()[k]);
    d = std::min(d, kTwoPi - d);
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(const GroupPoint& a) {
  return geodesic_distance(GroupPoint::identity(a.backend(), a.dimension()), a);
}

double diameter(Backend backend, int torus_dim) {
  return backend == Backend::SU2 ? kPi : kPi * std::sqrt(static_cast<double>(torus_dim));
}

GroupPoint exp_map(std::span<const double> v, Backend backend) {
  if (backend == Backend::Torus) return GroupPoint::torus(std::vector<double>(v.begin(), v.end()));
  if (v.size() != 3) throw std::invalid_argument("su(2) algebra vectors have 3 components");
  const double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (t == 0.0) return GroupPoint::identity(Backend::SU2);
  const double s = std::sin(t) / t;
  return GroupPoint::su2(std::cos(t), s * v[0], s * v[1], s * v[2]);
}

std::vector<double> log_map(const GroupPoint& a) {
  if (a.backend() == Backend::Torus) {
    std::vector<double> v(a.angles().begin(), a.angles().end());
    for (double& x : v)
      if (x > kPi) x -= kTwoPi;
    return v;
  }
  const auto& q = a.quaternion();
  const double vn = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  const double t = std::atan2(vn, q[0]);
  if (vn < 1e-14 && q[0] < 0.0) throw std::domain_error("log_map is undefined at the antipode of the identity");
  if (vn == 0.0) return {0.0, 0.0, 0.0};
  const double s = t / vn;
  return {s * q[1], s * q[2], s * q[3]};
}

EulerAngles euler_angles(const GroupPoint& x) {
  const auto& q = x.quaternion();
  const double c = std::hypot(q[0], q[3]);
  const double s = std::hypot(q[1], q[2]);
  const double beta = 2.0 * std::atan2(s, c);
  const double half_sum = c > 0.0 ? -std::atan2(q[3], q[0]) : 0.0;
  const double half_diff = s > 0.0 ? -std::atan2(q[1], -q[2]) : 0.0;
  return {half_sum + half_diff, beta, half_sum - half_diff};
}

GroupPoint from_euler(double alpha, double beta, double gamma) {
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const double hs = 0.5 * (alpha + gamma);
  const double hd = 0.5 * (alpha - gamma);
  return GroupPoint::su2(c * std::cos(hs), -s * std::sin(hd), -s * std::cos(hd), -c * std::sin(hs));
}

GroupPoint random_point(Backend backend, std::mt19937_64& rng, int torus_dim) {
  if (backend == Backend::SU2) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
      const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
      if (a * a + b * b + c * c + d * d > 1e-12) return GroupPoint::su2(a, b, c, d);
    }
  }
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> angles(static_cast<std::size_t>(torus_dim));
  for (double& a : angles) a = u(rng);
  return GroupPoint::torus(std::move(angles));
}

QuadratureGrid::QuadratureGrid(Backend backend, int resolution, int torus_dim, std::vector<GroupPoint> nodes,
                               std::vector<double> weights, double exactness_degree,
                               std::shared_ptr<const EulerLayout> euler)
    : backend_(backend),
      resolution_(resolution),
      torus_dim_(torus_dim),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      exactness_(exactness_degree),
      euler_(std::move(euler)) {
  if (nodes_.size() != weights_.size()) throw std::invalid_argument("node and weight counts differ");
  for (double w : weights_)
    if (!(w > 0.0)) throw std::invalid_argument("quadrature weights must be positive");
}

double QuadratureGrid::spacing() const {
  if (backend_ == Backend::SU2) return kPi / (2.0 * resolution_);
  return kTwoPi / resolution_;
}

double QuadratureGrid::ball_mass(const Ball& ball) const {
  double m = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (ball.contains(nodes_[i])) m += weights_[i];
  return m;
}

std::vector<double> QuadratureGrid::distances_from(const GroupPoint& p) const {
  std::vector<double> d(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) d[i] = geodesic_distance(p, nodes_[i]);
  return d;
}

std::shared_ptr<const QuadratureGrid> haar_grid(Backend backend, int resolution, int torus_dim) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  if (backend == Backend::Torus) {
    if (torus_dim < 1) throw std::invalid_argument("torus dimension must be positive");
    std::size_t count = 1;
    for (int k = 0; k < torus_dim; ++k) count *= static_cast<std::size_t>(resolution);
    std::vector<GroupPoint> nodes;
    nodes.reserve(count);
    std::vector<double> weights(count, 1.0 / static_cast<double>(count));
    std::vector<int> idx(static_cast<std::size_t>(torus_dim), 0);
    for (std::size_t n = 0; n < count; ++n) {
      std::vector<double> a(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) a[k] = kTwoPi * idx[k] / resolution;
      nodes.push_back(GroupPoint::torus(std::move(a)));
      for (int k = torus_dim - 1; k >= 0; --k) {
        if (++idx[static_cast<std::size_t>(k)] < resolution) break;
        idx[static_cast<std::size_t>(k)] = 0;
      }
    }
    return std::make_shared<QuadratureGrid>(backend, resolution, torus_dim, std::move(nodes), std::move(weights),
                                            static_cast<double>(resolution - 1));
  }

  auto layout = std::make_shared<EulerLayout>();
  layout->n_alpha = 2 * resolution;
  layout->n_beta = resolution;
  layout->n_gamma = 4 * resolution;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(resolution));
  for (int b = 0; b < resolution; ++b) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(b), &x, &w, table);
    layout->beta.push_back(std::acos(x));
    layout->beta_weight.push_back(0.5 * w);
  }
  gsl_integration_glfixed_table_free(table);

  const std::size_t count = static_cast<std::size_t>(layout->n_alpha) * layout->n_beta * layout->n_gamma;
  std::vector<GroupPoint> nodes;
  std::vector<double> weights;
  nodes.reserve(count);
  weights.reserve(count);
  const double wa = 1.0 / (static_cast<double>(layout->n_alpha) * layout->n_gamma);
  for (int b = 0; b < layout->n_beta; ++b)
    for (int a = 0; a < layout->n_alpha; ++a)
      for (int c = 0; c < layout->n_gamma; ++c) {
        nodes.push_back(from_euler(kTwoPi * a / layout->n_alpha, layout->beta[static_cast<std::size_t>(b)],
                                   2.0 * kTwoPi * c / layout->n_gamma));
        weights.push_back(wa * layout->beta_weight[static_cast<std::size_t>(b)]);
      }
  return std::make_shared<QuadratureGrid>(backend, resolution, 1, std::move(nodes), std::move(weights),
                                          2.0 * resolution - 1.0, std::move(layout));
}

int resolution_for_total_spin(int two_spin_total) { return std::max(2, (two_spin_total + 2 + 3) / 4); }

double su2_ball_volume(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= kPi) return 1.0;
  return (r - std::sin(r) * std::cos(r)) / kPi;
}

nlohmann::json grid_to_json(const QuadratureGrid& grid) {
  nlohmann::json j;
  j["version"] = 1;
  j["backend"] = to_string(grid.backend());
  j["resolution"] = grid.resolution();
  j["torus_dim"] = grid.torus_dim();
  j["exactness_degree"] = grid.exactness_degree();
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    if (grid.backend() == Backend::SU2) {
      for (double v : grid.node(i).quaternion()) row.push_back(v);
    } else {
      for (double v : grid.node(i).angles()) row.push_back(v);
    }
    row.push_back(grid.weight(i));
    nodes.push_back(std::move(row));
  }
  return j;
}

std::shared_ptr<const QuadratureGrid> grid_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported grid format version");
  const Backend backend = backend_from_string(j.at("backend").get<std::string>());
  const int resolution = j.at("resolution").get<int>();
  const int torus_dim = j.value("torus_dim", 1);
  if (backend == Backend::SU2) {
    // Rebuild so the product layout used by the fast transforms is available, then check agreement.
    auto grid = haar_grid(backend, resolution);
    const auto& rows = j.at("nodes");
    if (rows.size() != grid->size()) throw std::invalid_argument("grid node count does not match resolution");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& q = grid->node(i).quaternion();
      for (int k = 0; k < 4; ++k)
        if (std::fabs(rows[i][static_cast<std::size_t>(k)].get<double>() - q[static_cast<std::size_t>(k)]) > 1e-12)
          throw std::invalid_argument("grid nodes do not match the Euler-angle rule");
    }
    return grid;
  }
  std::vector<GroupPoint> nodes;
  std::vector<double> weights;
  for (const auto& row : j.at("nodes")) {
    std::vector<double> a;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) a.push_back(row[k].get<double>());
    nodes.push_back(GroupPoint::torus(std::move(a)));
    weights.push_back(row.back().get<double>());
  }
  return std::make_shared<QuadratureGrid>(backend, resolution, torus_dim, std::move(nodes), std::move(weights),
                                          j.at("exactness_degree").get<double>());
}

}  // namespace lgpdo
