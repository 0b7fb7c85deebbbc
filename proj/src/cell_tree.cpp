#include "lgpdo/cell_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lgpdo {

namespace {

// Member of `nodes` closest to the (sign-aligned, normalized) mean of the group.
std::size_t medoid_of_mean(const QuadratureGrid& grid, const std::vector<std::size_t>& nodes, std::size_t anchor) {
  GroupPoint mean = grid.node(anchor);
  if (grid.backend() == Backend::SU2) {
    const auto& a = grid.node(anchor).quaternion();
    Quaternion s{0, 0, 0, 0};
    for (std::size_t i : nodes) {
      const auto& q = grid.node(i).quaternion();
      const double sign = (q[0] * a[0] + q[1] * a[1] + q[2] * a[2] + q[3] * a[3]) < 0.0 ? -1.0 : 1.0;
      for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] += sign * q[static_cast<std::size_t>(k)];
    }
    if (s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3] > 1e-24) mean = GroupPoint::su2(s);
  } else {
    const std::size_t dim = grid.node(anchor).angles().size();
    std::vector<double> ang(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      double c = 0.0, s = 0.0;
      for (std::size_t i : nodes) {
        c += std::cos(grid.node(i).angles()[k]);
        s += std::sin(grid.node(i).angles()[k]);
      }
      ang[k] = (c * c + s * s > 1e-24) ? std::atan2(s, c) : grid.node(anchor).angles()[k];
    }
    mean = GroupPoint::torus(std::move(ang));
  }
  std::size_t best = anchor;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i : nodes) {
    const double d = geodesic_distance(mean, grid.node(i));
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::vector<std::size_t>> assign(const QuadratureGrid& grid, const std::vector<std::size_t>& nodes,
                                             const std::vector<std::size_t>& seeds) {
  std::vector<std::vector<std::size_t>> groups(seeds.size());
  for (std::size_t i : nodes) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const double d = geodesic_distance(grid.node(seeds[s]), grid.node(i));
      if (d < bd) {
        bd = d;
        best = s;
      }
    }
    groups[best].push_back(i);
  }
  return groups;
}

}  // namespace

CellTree::CellTree(std::shared_ptr<const QuadratureGrid> grid, int branching) : grid_(std::move(grid)) {
  if (!grid_ || grid_->size() == 0) throw std::invalid_argument("cell tree needs a nonempty grid");
  if (branching < 2) throw std::invalid_argument("cell tree branching must be at least 2");
  Cell root;
  root.nodes.resize(grid_->size());
  for (std::size_t i = 0; i < root.nodes.size(); ++i) root.nodes[i] = i;
  root.mass = 0.0;
  for (double w : grid_->weights()) root.mass += w;
  root.ball = Ball{GroupPoint::identity(grid_->backend(), grid_->torus_dim()),
                   2.0 * diameter(grid_->backend(), grid_->torus_dim())};
  cells_.push_back(std::move(root));

  for (std::size_t i = 0; i < cells_.size(); ++i) split(i, branching);

  // Ball masses and covering-ball membership counts; single-node cells only cover their own node.
  std::vector<int> count(grid_->size(), 0);
  for (Cell& c : cells_) {
    if (c.nodes.size() == 1) {
      ++count[c.nodes.front()];
      c.ball_mass = c.mass;
    } else {
      c.ball_mass = 0.0;
      for (std::size_t n = 0; n < grid_->size(); ++n)
        if (c.ball.contains(grid_->node(n))) {
          ++count[n];
          c.ball_mass += grid_->weight(n);
        }
    }
    depth_ = std::max(depth_, c.level);
    if (c.level > 0) kappa_ = std::max(kappa_, cells_[c.parent].mass / c.mass);
    eta_ = std::max(eta_, c.ball_mass / c.mass);
  }
  overlap_ = *std::max_element(count.begin(), count.end());
}

void CellTree::split(std::size_t index, int branching) {
  if (cells_[index].nodes.size() <= 1) return;
  const QuadratureGrid& grid = *grid_;
  const std::vector<std::size_t> nodes = cells_[index].nodes;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(branching), nodes.size());

  // Farthest-first seeds starting from the node nearest the cell mean.
  std::vector<std::size_t> seeds{medoid_of_mean(grid, nodes, nodes.front())};
  std::vector<double> mind(nodes.size(), std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    std::size_t far = 0;
    double fd = -1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      mind[i] = std::min(mind[i], geodesic_distance(grid.node(seeds.back()), grid.node(nodes[i])));
      if (mind[i] > fd) {
        fd = mind[i];
        far = i;
      }
    }
    if (fd <= 0.0) break;
    seeds.push_back(nodes[far]);
  }

  auto groups = assign(grid, nodes, seeds);
  for (int iter = 0; iter < 2; ++iter) {
    for (std::size_t s = 0; s < seeds.size(); ++s)
      if (!groups[s].empty()) seeds[s] = medoid_of_mean(grid, groups[s], seeds[s]);
    groups = assign(grid, nodes, seeds);
  }

  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> parts;
  for (std::size_t s = 0; s < seeds.size(); ++s)
    if (!groups[s].empty()) parts.emplace_back(seeds[s], std::move(groups[s]));
  if (parts.size() < 2) {
    // Coincident points; split by index so recursion terminates.
    std::vector<std::size_t> a(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(nodes.size() / 2));
    std::vector<std::size_t> b(nodes.begin() + static_cast<std::ptrdiff_t>(nodes.size() / 2), nodes.end());
    parts.clear();
    parts.emplace_back(a.front(), std::move(a));
    parts.emplace_back(b.front(), std::move(b));
  }

  for (auto& [center, members] : parts) {
    Cell c;
    c.parent = index;
    c.level = cells_[index].level + 1;
    double radius = 0.0;
    for (std::size_t i : members) {
      c.mass += grid.weight(i);
      radius = std::max(radius, geodesic_distance(grid.node(center), grid.node(i)));
    }
    c.ball = Ball{grid.node(center), radius * (1.0 + 1e-12) + 1e-12};
    c.nodes = std::move(members);
    cells_[index].children.push_back(cells_.size());
    cells_.push_back(std::move(c));
  }
}

}  // namespace lgpdo
