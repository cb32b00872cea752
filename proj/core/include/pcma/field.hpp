#ifndef PCMA_FIELD_HPP
#define PCMA_FIELD_HPP

#include <Eigen/Core>
#include <vector>

#include "pcma/expression.hpp"
#include "pcma/grid.hpp"

namespace pcma {

// One real value per grid node (interior, band and exterior alike) at a fixed
// time.  Values are finite everywhere; potentials with log poles are clipped
// at -m_cap and the clipped nodes carry a floor flag (flag set <=> value is
// exactly -m_cap).
struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;
  std::vector<uint8_t> floored;
  double time = 0.0;
  double m_cap = 40.0;

  double at(int64_t node) const { return values[node]; }
  double at_interior(int64_t slot) const { return values[grid->interior_nodes[slot]]; }
};

ScalarField make_field(const GridPtr& grid, double time, double m_cap);

// Evaluates expr at every node of the grid (expressions are defined on the
// whole bounding box, so band/exterior nodes get exact analytic values).
ScalarField sample_expression(const GridPtr& grid, const ExprPtr& expr, double time,
                              double m_cap = 40.0);

// Pointwise minimum; floor flags are recomputed from the result values.
ScalarField pointwise_min(const ScalarField& a, const ScalarField& b);

void recompute_floor_flags(ScalarField& f);
void require_finite(const ScalarField& f, const char* what);

double interior_max(const ScalarField& f);
double interior_min(const ScalarField& f);
// max over interior nodes of (a - b)
double interior_sup_diff(const ScalarField& a, const ScalarField& b);
double interior_max_abs_diff(const ScalarField& a, const ScalarField& b);
// Grid-weighted L1 distance over interior nodes, skipping nodes floored in
// either argument (h^{2n} cell measure).
double interior_l1_diff_unfloored(const ScalarField& a, const ScalarField& b);

// Multilinear interpolation of the stored node values at an arbitrary point
// of the bounding box.
double interpolate(const ScalarField& f, const Point& p);

}  // namespace pcma

#endif
