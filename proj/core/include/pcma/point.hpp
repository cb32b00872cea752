#ifndef PCMA_POINT_HPP
#define PCMA_POINT_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace pcma {

// A point of C^n identified with R^{2n}, n <= 2.  Coordinate order is
// (x1, y1) for n=1 and (x1, y1, x2, y2) for n=2 with z_a = x_a + i*y_a.
// Unused trailing coordinates are kept at zero so the same type serves both
// dimensions.
struct Point {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
  int dim = 2;  // number of real coordinates in use (2n)

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
};

inline Point make_point1(double x, double y) { return Point{{x, y, 0, 0}, 2}; }
inline Point make_point2(double x1, double y1, double x2, double y2) {
  return Point{{x1, y1, x2, y2}, 4};
}

inline double dist2(const Point& a, const Point& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

inline double norm2(const Point& a) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.c[i] * a.c[i];
  return s;
}

inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

}  // namespace pcma

#endif
