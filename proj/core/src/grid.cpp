#include "pcma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

std::vector<StencilOffset> make_offsets(int n) {
  std::vector<StencilOffset> offs;
  const int dim = 2 * n;
  for (int a = 0; a < dim; ++a)
    for (int s : {+1, -1}) {
      StencilOffset o;
      o.d[a] = static_cast<int8_t>(s);
      offs.push_back(o);
    }
  if (n == 2) {
    // mixed-derivative planes (x1,x2), (y1,y2), (x1,y2), (y1,x2)
    const std::array<std::pair<int, int>, 4> planes{{{0, 2}, {1, 3}, {0, 3}, {1, 2}}};
    for (auto [a, b] : planes)
      for (int sa : {+1, -1})
        for (int sb : {+1, -1}) {
          StencilOffset o;
          o.d[a] = static_cast<int8_t>(sa);
          o.d[b] = static_cast<int8_t>(sb);
          offs.push_back(o);
        }
  }
  return offs;
}

// fractional position of the boundary crossing on the segment from p (inside)
// toward p + step (outside or on the boundary)
double crossing_theta(const DomainSpec& d, const Point& p, const std::array<double, 4>& step,
                      int dim) {
  double a = 0, b = 0, c = -d.radius * d.radius;
  for (int i = 0; i < dim; ++i) {
    const double pc = p.c[i] - d.center.c[i];
    a += step[i] * step[i];
    b += pc * step[i];
    c += pc * pc;
  }
  // a*theta^2 + 2*b*theta + c = 0 with c < 0 has exactly one positive root
  const double disc = b * b - a * c;
  double theta = (-b + std::sqrt(disc)) / a;
  if (theta > 1.0) theta = 1.0;  // neighbor numerically on the boundary
  return theta;
}

// Floor on the crossing fraction.  A node this close to the boundary is on it
// to machine precision and the huge weights simply pin its value to the
// Dirichlet data; anything larger must keep the genuine linear closure or the
// discrete Hessian of a plurisubharmonic state can turn negative at the node.
constexpr double kThetaFloor = 1e-9;

}  // namespace

const std::vector<StencilOffset>& stencil_offsets(int n) {
  static const std::vector<StencilOffset> offs1 = make_offsets(1);
  static const std::vector<StencilOffset> offs2 = make_offsets(2);
  return n == 1 ? offs1 : offs2;
}

int64_t Grid::node_index(const std::array<int, 4>& idx) const {
  const int dim = real_dim();
  int64_t v = 0;
  for (int i = dim - 1; i >= 0; --i) v = v * resolution + idx[i];
  return v;
}

std::array<int, 4> Grid::node_multi_index(int64_t node) const {
  std::array<int, 4> idx{0, 0, 0, 0};
  const int dim = real_dim();
  for (int i = 0; i < dim; ++i) {
    idx[i] = static_cast<int>(node % resolution);
    node /= resolution;
  }
  return idx;
}

Point Grid::node_point(int64_t node) const {
  const auto idx = node_multi_index(node);
  Point p;
  p.dim = real_dim();
  for (int i = 0; i < p.dim; ++i)
    p.c[i] = domain.center.c[i] - domain.radius + h * idx[i];
  return p;
}

bool Grid::in_box(const std::array<int, 4>& idx) const {
  for (int i = 0; i < real_dim(); ++i)
    if (idx[i] < 0 || idx[i] >= resolution) return false;
  return true;
}

int64_t Grid::neighbor(int64_t node, const StencilOffset& o) const {
  auto idx = node_multi_index(node);
  for (int i = 0; i < real_dim(); ++i) idx[i] += o.d[i];
  if (!in_box(idx)) return -1;
  return node_index(idx);
}

std::pair<int64_t, double> Grid::nearest_node(const Point& p) const {
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int i = 0; i < real_dim(); ++i) {
    const double rel = (p.c[i] - (domain.center.c[i] - domain.radius)) / h;
    int k = static_cast<int>(std::lround(rel));
    k = std::clamp(k, 0, resolution - 1);
    idx[i] = k;
  }
  const int64_t node = node_index(idx);
  return {node, dist(node_point(node), p)};
}

const BoundaryCrossing& Grid::crossing_for(int64_t interior_slot, int offset_id) const {
  auto it = crossings.find(crossing_key(interior_slot, offset_id));
  require(it != crossings.end(), ErrorCode::InvalidArgument,
          "no boundary crossing registered for this stencil arm");
  return it->second;
}

GridPtr build_grid(const DomainSpec& domain, int resolution) {
  domain.validate();
  require(resolution % 2 == 1, ErrorCode::EvenResolution,
          "grid resolution must be odd so the center is a node (got " +
              std::to_string(resolution) + ")");
  require(resolution >= 17, ErrorCode::GridTooSmall,
          "grid resolution must be at least 17 (got " + std::to_string(resolution) + ")");

  auto g = std::make_shared<Grid>();
  g->domain = domain;
  g->resolution = resolution;
  g->h = 2.0 * domain.radius / (resolution - 1);

  const int dim = domain.real_dim();
  int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= resolution;
  g->total_nodes = total;

  g->node_class.assign(static_cast<std::size_t>(total), NodeClass::Exterior);
  g->interior_index.assign(static_cast<std::size_t>(total), -1);

  for (int64_t node = 0; node < total; ++node) {
    if (defining_function(domain, g->node_point(node)) < 0.0) {
      g->interior_index[static_cast<std::size_t>(node)] =
          static_cast<int32_t>(g->interior_nodes.size());
      g->interior_nodes.push_back(node);
      g->node_class[static_cast<std::size_t>(node)] = NodeClass::Interior;
    }
  }

  const auto& offs = stencil_offsets(domain.n);
  require(offs.size() < 256, ErrorCode::InvalidArgument, "offset id must fit the crossing key");
  g->full_interior_stencil.assign(g->interior_nodes.size(), 1);

  std::set<int64_t> band;
  for (std::size_t slot = 0; slot < g->interior_nodes.size(); ++slot) {
    const int64_t node = g->interior_nodes[slot];
    const Point p = g->node_point(node);
    for (std::size_t oid = 0; oid < offs.size(); ++oid) {
      const int64_t nb = g->neighbor(node, offs[oid]);
      // interior nodes sit strictly inside the box, so every stencil arm stays
      // on the lattice
      require(nb >= 0, ErrorCode::InvalidArgument, "stencil arm left the bounding box");
      if (g->node_class[static_cast<std::size_t>(nb)] == NodeClass::Interior) continue;

      g->full_interior_stencil[slot] = 0;
      band.insert(nb);

      std::array<double, 4> step{0, 0, 0, 0};
      for (int i = 0; i < dim; ++i) step[i] = g->h * offs[oid].d[i];
      BoundaryCrossing bc;
      bc.theta = std::max(crossing_theta(domain, p, step, dim), kThetaFloor);
      bc.crossing.dim = dim;
      for (int i = 0; i < dim; ++i) bc.crossing.c[i] = p.c[i] + bc.theta * step[i];
      bc.w_boundary = 1.0 / bc.theta;
      bc.w_interior = 1.0 - 1.0 / bc.theta;
      g->crossings.emplace(Grid::crossing_key(static_cast<int64_t>(slot), static_cast<int>(oid)),
                           bc);
    }
  }

  g->band_nodes.reserve(band.size());
  for (int64_t node : band) {
    g->node_class[static_cast<std::size_t>(node)] = NodeClass::Band;
    BandNode bn;
    bn.node = node;
    bn.projection = project_to_boundary(domain, g->node_point(node));
    g->band_nodes.push_back(bn);
  }

  return g;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what) {
  if (a == b) return;
  const bool same = a && b && a->domain.n == b->domain.n && a->resolution == b->resolution &&
                    a->domain.radius == b->domain.radius &&
                    dist2(a->domain.center, b->domain.center) == 0.0;
  require(same, ErrorCode::GridMismatch, std::string(what) + ": fields live on different grids");
}

}  // namespace pcma
