#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpdo/cell_tree.hpp"
#include "lgpdo/fourier.hpp"
#include "lgpdo/group.hpp"

namespace lgpdo {

// (sum w_i |f_i|^p)^(1/p); p = infinity gives the max.
double lp_norm(const GridFunction& f, double p);

// sup_alpha alpha |{|f| > alpha}|, exact over the jump points of the grid distribution function.
double weak_l1_quasinorm(const GridFunction& f);

// Quadrature average of f over the ball (0 for an empty ball).
cplx ball_average(const GridFunction& f, const Ball& ball);
// (1/|B|) integral over B of |f - f_B|.
double mean_oscillation(const GridFunction& f, const Ball& ball);

// Balls with the given radii centred at every listed centre.
std::vector<Ball> ball_sample(std::span<const GroupPoint> centers, std::span<const double> radii);
// Log-spaced radii in [r_min, r_max].
std::vector<double> log_spaced(double r_min, double r_max, int count);
// Every `stride`-th grid node, starting at node 0.
std::vector<GroupPoint> center_subsample(const QuadratureGrid& grid, std::size_t count);

// max over sampled balls B containing x of (1/|B|) int_B |f|; centres default to every grid node.
GridFunction maximal_function(const GridFunction& f, std::span<const double> radii,
                              std::span<const GroupPoint> centers = {});

// Largest mean oscillation over the ball sample; a lower bound for the BMO seminorm.
double bmo_seminorm(const GridFunction& f, std::span<const Ball> balls);
// bmo_seminorm for several functions on one grid, sharing the per-centre distance tables.
std::vector<double> bmo_seminorms(std::span<const GridFunction> fs, std::span<const Ball> balls);

struct Atom {
  Ball ball;
  double ball_mass = 0.0;
  GridFunction values;
};

// Random smooth profile on B(z, R), mean removed, scaled so that sup |a| = 1/|B(z, R)|.
// Throws std::domain_error when the ball holds fewer than two grid nodes.
Atom make_atom(std::shared_ptr<const QuadratureGrid> grid, const GroupPoint& z, double radius, std::uint64_t seed);

struct BadPart {
  GridFunction b;
  std::size_t cell = 0;
  Ball ball;
  double ball_mass = 0.0;
};

// Measured constants of one decomposition (ratios against the level lambda and ||f||_1).
struct CZConstants {
  double good_sup = 0.0;   // ||g||_inf / lambda
  double good_l1 = 0.0;    // ||g||_1 / ||f||_1
  double bad_mean = 0.0;   // max |int b_j|
  double bad_l1 = 0.0;     // max ||b_j||_1 / (lambda |I_j|)
  double ball_sum = 0.0;   // sum |I_j| lambda / ||f||_1
  double bad_total = 0.0;  // sum ||b_j||_1 / ||f||_1
  int overlap = 0;         // max number of I_j containing a node
};

// A-priori constants of the cell tree that bound every decomposition built on it.
struct CZBounds {
  double good_sup;   // kappa
  double good_l1;    // 1
  double bad_l1;     // 2 kappa
  double ball_sum;   // eta
  double bad_total;  // 2
  int overlap;       // M
};

struct CZDecomposition {
  GridFunction good;
  std::vector<BadPart> bad;
  double level = 0.0;
  int overlap_bound = 0;
  CZConstants measured;
};

CZBounds cz_bounds(const CellTree& tree);
// Stopping-time decomposition at level lambda; requires lambda > mean |f|.
CZDecomposition cz_decompose(const GridFunction& f, double level, const CellTree& tree);
// Checks properties (1)-(6) against the tree bounds; mean-zero tolerance as given.
bool cz_properties_hold(const CZDecomposition& d, const CZBounds& bounds, double mean_tol = 1e-9);

nlohmann::json atom_to_json(const Atom& a);
nlohmann::json cz_to_json(const CZDecomposition& d);

}  // namespace lgpdo
