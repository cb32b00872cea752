#include "pcma/domain.hpp"

#include <cmath>

#include "pcma/errors.hpp"

namespace pcma {

void DomainSpec::validate() const {
  require(n == 1 || n == 2, ErrorCode::ConfigError, "complex dimension n must be 1 or 2");
  require(radius > 0.0, ErrorCode::ConfigError, "domain radius must be positive");
  require(center.dim == 2 * n, ErrorCode::ConfigError, "domain center has wrong dimension");
}

double defining_function(const DomainSpec& d, const Point& z) {
  return dist2(z, d.center) - d.radius * d.radius;
}

Point project_to_boundary(const DomainSpec& d, const Point& z) {
  const double r = dist(z, d.center);
  require(r > 0.0, ErrorCode::InvalidArgument, "cannot project the center to the boundary");
  Point p = z;
  const double s = d.radius / r;
  for (int i = 0; i < p.dim; ++i) p.c[i] = d.center.c[i] + (z.c[i] - d.center.c[i]) * s;
  return p;
}

double boundary_distance(const DomainSpec& d, const Point& z) {
  return std::abs(dist(z, d.center) - d.radius);
}

}  // namespace pcma
