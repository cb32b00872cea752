#ifndef PCMA_DOMAIN_HPP
#define PCMA_DOMAIN_HPP

#include "pcma/point.hpp"

namespace pcma {

// Strictly pseudoconvex model domains: the disc in C^1 and the ball in C^2,
// given by the defining function rho(z) = |z - center|^2 - radius^2.  rho < 0
// inside, rho = 0 on the boundary, and the complex Hessian of rho is the
// identity everywhere, which is what makes these domains convenient reference
// geometry for barrier constructions.
struct DomainSpec {
  int n = 1;           // complex dimension (1 or 2)
  double radius = 1.0;
  Point center;        // dim must equal 2n

  void validate() const;
  int real_dim() const { return 2 * n; }
};

double defining_function(const DomainSpec& d, const Point& z);

// Radial projection of z onto the boundary sphere.  Requires z != center.
Point project_to_boundary(const DomainSpec& d, const Point& z);

// Distance from z to the boundary sphere (positive inside and outside).
double boundary_distance(const DomainSpec& d, const Point& z);

}  // namespace pcma

#endif
