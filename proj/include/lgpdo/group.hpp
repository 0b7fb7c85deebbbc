#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lgpdo {

enum class Backend { SU2, Torus };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& name);

using Quaternion = std::array<double, 4>;

// Element of SU(2) (unit quaternion) or of the n-torus (angle vector in [0, 2pi)).
//
// The SU(2) element q0 + q1 i + q2 j + q3 k is identified with the matrix
//   [[q0 + i q3,  q2 - i q1],
//    [-q2 - i q1, q0 - i q3]],
// which is the spin-1/2 representation evaluated at the point.
class GroupPoint {
 public:
  static GroupPoint identity(Backend backend, int torus_dim = 1);
  static GroupPoint su2(double q0, double q1, double q2, double q3);
  static GroupPoint su2(const Quaternion& q) { return su2(q[0], q[1], q[2], q[3]); }
  static GroupPoint torus(std::vector<double> angles);

  Backend backend() const { return backend_; }
  const Quaternion& quaternion() const;
  std::span<const double> angles() const;
  // Topological dimension of the group this point lives in.
  int dimension() const;

  bool operator==(const GroupPoint&) const = default;

 private:
  GroupPoint() = default;

  Backend backend_ = Backend::SU2;
  Quaternion q_{1.0, 0.0, 0.0, 0.0};
  std::vector<double> angles_;
};

GroupPoint compose(const GroupPoint& a, const GroupPoint& b);
GroupPoint inverse(const GroupPoint& a);

// SU(2): arc length on the unit 3-sphere (diameter pi). Torus: flat metric with wraparound.
double geodesic_distance(const GroupPoint& a, const GroupPoint& b);
double norm(const GroupPoint& a);  // distance to the identity
double diameter(Backend backend, int torus_dim = 1);

// Exponential map normalized so that norm(exp_map(v)) == |v| for |v| < pi (SU(2)).
GroupPoint exp_map(std::span<const double> v, Backend backend);
std::vector<double> log_map(const GroupPoint& a);

struct EulerAngles {
  double alpha;
  double beta;
  double gamma;
};

// ZYZ Euler angles: x = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz) in the spin-1/2 picture.
EulerAngles euler_angles(const GroupPoint& x);
GroupPoint from_euler(double alpha, double beta, double gamma);

GroupPoint random_point(Backend backend, std::mt19937_64& rng, int torus_dim = 1);

struct Ball {
  GroupPoint center = GroupPoint::identity(Backend::SU2);
  double radius = 0.0;

  bool contains(const GroupPoint& x) const { return geodesic_distance(center, x) < radius; }
};

// Product structure of the SU(2) Euler-angle rule; node index is (b * n_alpha + a) * n_gamma + c.
struct EulerLayout {
  int n_alpha = 0;
  int n_beta = 0;
  int n_gamma = 0;
  std::vector<double> beta;          // arccos of the Gauss-Legendre nodes
  std::vector<double> beta_weight;   // Gauss-Legendre weights divided by 2 (sum to 1)
};

// Discretized normalized Haar measure.
class QuadratureGrid {
 public:
  QuadratureGrid(Backend backend, int resolution, int torus_dim, std::vector<GroupPoint> nodes,
                 std::vector<double> weights, double exactness_degree,
                 std::shared_ptr<const EulerLayout> euler = nullptr);

  Backend backend() const { return backend_; }
  int resolution() const { return resolution_; }
  int torus_dim() const { return torus_dim_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<GroupPoint>& nodes() const { return nodes_; }
  const GroupPoint& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  // SU(2): largest total spin l + l' for which products of matrix coefficients integrate exactly.
  // Torus: largest |k|_inf for which a single character integrates exactly.
  double exactness_degree() const { return exactness_; }
  // Typical geodesic spacing between neighbouring nodes.
  double spacing() const;
  const EulerLayout* euler() const { return euler_.get(); }

  // Haar mass of a ball, by quadrature.
  double ball_mass(const Ball& ball) const;
  std::vector<double> distances_from(const GroupPoint& p) const;

 private:
  Backend backend_;
  int resolution_;
  int torus_dim_;
  std::vector<GroupPoint> nodes_;
  std::vector<double> weights_;
  double exactness_;
  std::shared_ptr<const EulerLayout> euler_;
};

// SU(2): Euler-angle product rule with 2N uniform alpha nodes on [0, 2pi), N Gauss-Legendre nodes
// in cos(beta), 4N uniform gamma nodes on [0, 4pi); exact for total spin up to 2N - 1.
// Torus: uniform N^dim tensor grid.
std::shared_ptr<const QuadratureGrid> haar_grid(Backend backend, int resolution, int torus_dim = 1);

// Smallest SU(2) resolution whose exactness degree covers total spin two_spin_total / 2.
int resolution_for_total_spin(int two_spin_total);

// Volume of the geodesic ball B(e, r) in normalized Haar measure, closed form (test oracle).
double su2_ball_volume(double r);

nlohmann::json grid_to_json(const QuadratureGrid& grid);
std::shared_ptr<const QuadratureGrid> grid_from_json(const nlohmann::json& j);

}  // namespace lgpdo
