#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "lgpdo/group.hpp"

namespace lgpdo {

// Nested partition of the grid nodes, refined by geodesic Voronoi splitting down to single nodes.
// Cells play the role of dyadic cubes; each cell carries the smallest grid-centred ball covering it.
struct Cell {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> children;
  std::size_t parent = 0;
  int level = 0;
  double mass = 0.0;
  Ball ball;
  double ball_mass = 0.0;
};

class CellTree {
 public:
  explicit CellTree(std::shared_ptr<const QuadratureGrid> grid, int branching = 8);

  const QuadratureGrid& grid() const { return *grid_; }
  const std::shared_ptr<const QuadratureGrid>& grid_ptr() const { return grid_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  std::size_t root() const { return 0; }
  int depth() const { return depth_; }

  // max over cells of |parent| / |child|
  double mass_ratio() const { return kappa_; }
  // max over cells of |covering ball| / |cell|
  double ball_ratio() const { return eta_; }
  // max over nodes of the number of covering balls (summed over all levels) containing the node;
  // bounds the overlap of any family of pairwise disjoint cells.
  int overlap_bound() const { return overlap_; }

 private:
  void split(std::size_t index, int branching);

  std::shared_ptr<const QuadratureGrid> grid_;
  std::vector<Cell> cells_;
  int depth_ = 0;
  double kappa_ = 1.0;
  double eta_ = 1.0;
  int overlap_ = 0;
};

}  // namespace lgpdo
