#include "pcma/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcma/errors.hpp"

namespace pcma {

ScalarField make_field(const GridPtr& grid, double time, double m_cap) {
  ScalarField f;
  f.grid = grid;
  f.values = Eigen::VectorXd::Zero(grid->total_nodes);
  f.floored.assign(static_cast<std::size_t>(grid->total_nodes), 0);
  f.time = time;
  f.m_cap = m_cap;
  return f;
}

ScalarField sample_expression(const GridPtr& grid, const ExprPtr& expr, double time,
                              double m_cap) {
  ScalarField f = make_field(grid, time, m_cap);
  EvalContext ctx;
  ctx.t = time;
  for (int64_t node = 0; node < grid->total_nodes; ++node) {
    ctx.z = grid->node_point(node);
    f.values[node] = expr->eval(ctx);
  }
  require_finite(f, "sampled expression");
  return f;
}

ScalarField pointwise_min(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "pointwise_min");
  ScalarField out = a;
  out.values = a.values.cwiseMin(b.values);
  out.m_cap = std::max(a.m_cap, b.m_cap);
  recompute_floor_flags(out);
  return out;
}

void recompute_floor_flags(ScalarField& f) {
  for (int64_t node = 0; node < f.grid->total_nodes; ++node)
    f.floored[static_cast<std::size_t>(node)] = (f.values[node] == -f.m_cap) ? 1 : 0;
}

void require_finite(const ScalarField& f, const char* what) {
  for (int64_t node = 0; node < f.grid->total_nodes; ++node)
    if (!std::isfinite(f.values[node]))
      fail(ErrorCode::DomainError,
           std::string(what) + " has a non-finite value at node " + std::to_string(node));
}

double interior_max(const ScalarField& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (int64_t node : f.grid->interior_nodes) m = std::max(m, f.values[node]);
  return m;
}

double interior_min(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (int64_t node : f.grid->interior_nodes) m = std::min(m, f.values[node]);
  return m;
}

double interior_sup_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "interior_sup_diff");
  double m = -std::numeric_limits<double>::infinity();
  for (int64_t node : a.grid->interior_nodes) m = std::max(m, a.values[node] - b.values[node]);
  return m;
}

double interior_max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "interior_max_abs_diff");
  double m = 0;
  for (int64_t node : a.grid->interior_nodes)
    m = std::max(m, std::abs(a.values[node] - b.values[node]));
  return m;
}

double interior_l1_diff_unfloored(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "interior_l1_diff_unfloored");
  double s = 0;
  for (int64_t node : a.grid->interior_nodes) {
    if (a.floored[static_cast<std::size_t>(node)] || b.floored[static_cast<std::size_t>(node)])
      continue;
    s += std::abs(a.values[node] - b.values[node]);
  }
  double cell = 1.0;
  for (int i = 0; i < a.grid->real_dim(); ++i) cell *= a.grid->h;
  return s * cell;
}

double interpolate(const ScalarField& f, const Point& p) {
  const Grid& g = *f.grid;
  const int dim = g.real_dim();
  std::array<int, 4> base{0, 0, 0, 0};
  std::array<double, 4> frac{0, 0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    const double rel = (p.c[i] - (g.domain.center.c[i] - g.domain.radius)) / g.h;
    require(rel >= -1e-9 && rel <= g.resolution - 1 + 1e-9, ErrorCode::InvalidArgument,
            "interpolation point outside the grid box");
    double fl = std::floor(rel);
    int k = static_cast<int>(fl);
    if (k < 0) k = 0;
    if (k > g.resolution - 2) k = g.resolution - 2;
    base[i] = k;
    frac[i] = std::clamp(rel - k, 0.0, 1.0);
  }
  const int corners = 1 << dim;
  double acc = 0;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    std::array<int, 4> idx = base;
    for (int i = 0; i < dim; ++i) {
      if (c & (1 << i)) {
        idx[i] += 1;
        w *= frac[i];
      } else {
        w *= 1.0 - frac[i];
      }
    }
    acc += w * f.values[g.node_index(idx)];
  }
  return acc;
}

}  // namespace pcma
