#ifndef PCMA_GRID_HPP
#define PCMA_GRID_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "pcma/domain.hpp"
#include "pcma/point.hpp"

namespace pcma {

// Second-difference stencil offsets for the complex Hessian.  n=1 needs the
// four axis neighbors (the single Hessian entry is a quarter Laplacian).  n=2
// additionally needs the diagonal neighbors of the four mixed-derivative
// planes (x1,x2), (y1,y2), (x1,y2), (y1,x2); the (x1,y1) and (x2,y2) planes
// never appear because diagonal Hessian entries are real.
struct StencilOffset {
  std::array<int8_t, 4> d{0, 0, 0, 0};
};

const std::vector<StencilOffset>& stencil_offsets(int n);

enum class NodeClass : uint8_t { Interior = 0, Band = 1, Exterior = 2 };

// How a stencil arm that leaves the domain is closed: the ghost value at the
// exterior neighbor is the linear extrapolant through the evaluating interior
// node and the exact Dirichlet value at the boundary crossing of the segment,
//   u_ghost = w_interior * u(anchor) + w_boundary * phi(crossing).
// theta is the fractional distance from the anchor to the crossing; theta = 1
// means the neighbor sits exactly on the boundary.  theta is floored at 1e-9
// only to keep the weights finite; the closure stays first-order accurate for
// all theta, which the Hessian consistency requires.
struct BoundaryCrossing {
  double theta = 1.0;
  Point crossing;        // point on the boundary sphere
  double w_interior = 0.0;
  double w_boundary = 1.0;
};

struct BandNode {
  int64_t node = -1;
  Point projection;  // radial projection onto the boundary sphere
};

class Grid {
 public:
  DomainSpec domain;
  int resolution = 0;   // nodes per axis (odd, >= 17)
  double h = 0.0;       // uniform spacing, 2*radius/(resolution-1)
  int64_t total_nodes = 0;

  std::vector<NodeClass> node_class;
  std::vector<int64_t> interior_nodes;          // ascending node order
  std::vector<int32_t> interior_index;          // node -> dense interior slot, -1 outside
  std::vector<BandNode> band_nodes;             // ascending node order
  std::vector<uint8_t> full_interior_stencil;   // per interior slot: no arm leaves the domain
  // (interior slot, offset id) -> crossing data, present only for arms that
  // leave the domain.
  std::unordered_map<uint64_t, BoundaryCrossing> crossings;

  int n() const { return domain.n; }
  int real_dim() const { return domain.real_dim(); }
  int64_t interior_count() const { return static_cast<int64_t>(interior_nodes.size()); }

  static uint64_t crossing_key(int64_t interior_slot, int offset_id) {
    return (static_cast<uint64_t>(interior_slot) << 8) | static_cast<uint64_t>(offset_id);
  }

  int64_t node_index(const std::array<int, 4>& idx) const;
  std::array<int, 4> node_multi_index(int64_t node) const;
  Point node_point(int64_t node) const;
  bool in_box(const std::array<int, 4>& idx) const;
  int64_t neighbor(int64_t node, const StencilOffset& o) const;  // -1 if off the box

  // Nearest grid node to p (used to snap atom locations); second member is
  // the snap distance, at most h/2 per axis inside the box.
  std::pair<int64_t, double> nearest_node(const Point& p) const;

  const BoundaryCrossing& crossing_for(int64_t interior_slot, int offset_id) const;
};

using GridPtr = std::shared_ptr<const Grid>;

// Builds the Cartesian grid with embedded boundary metadata.  resolution must
// be odd (origin is a node) and at least 17.
GridPtr build_grid(const DomainSpec& domain, int resolution);

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what);

}  // namespace pcma

#endif
