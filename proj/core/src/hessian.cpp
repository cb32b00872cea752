#include "pcma/hessian.hpp"

#include <cmath>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

// centered pure second difference along axis a
inline double dxx(const ScalarField& u, const Grid& g, int64_t node, int a, double inv_h2) {
  auto idx = g.node_multi_index(node);
  auto ip = idx;
  ip[a] += 1;
  auto im = idx;
  im[a] -= 1;
  return (u.values[g.node_index(ip)] + u.values[g.node_index(im)] - 2.0 * u.values[node]) *
         inv_h2;
}

// centered mixed second difference in the (a, b) plane
inline double dab(const ScalarField& u, const Grid& g, int64_t node, int a, int b,
                  double inv_4h2) {
  auto idx = g.node_multi_index(node);
  auto pp = idx, pm = idx, mp = idx, mm = idx;
  pp[a] += 1; pp[b] += 1;
  pm[a] += 1; pm[b] -= 1;
  mp[a] -= 1; mp[b] += 1;
  mm[a] -= 1; mm[b] -= 1;
  return (u.values[g.node_index(pp)] - u.values[g.node_index(pm)] -
          u.values[g.node_index(mp)] + u.values[g.node_index(mm)]) *
         inv_4h2;
}

}  // namespace

HermitianField complex_hessian(const ScalarField& u) {
  const Grid& g = *u.grid;
  HermitianField H;
  H.grid = u.grid;
  H.n = g.n();
  const int64_t ni = g.interior_count();
  const double inv_h2 = 1.0 / (g.h * g.h);
  const double inv_4h2 = 0.25 * inv_h2;

  H.h11.resize(ni);
  if (H.n == 2) {
    H.h22.resize(ni);
    H.re12.resize(ni);
    H.im12.resize(ni);
  }

  for (int64_t s = 0; s < ni; ++s) {
    const int64_t node = g.interior_nodes[static_cast<std::size_t>(s)];
    if (H.n == 1) {
      H.h11[s] = 0.25 * (dxx(u, g, node, 0, inv_h2) + dxx(u, g, node, 1, inv_h2));
    } else {
      H.h11[s] = 0.25 * (dxx(u, g, node, 0, inv_h2) + dxx(u, g, node, 1, inv_h2));
      H.h22[s] = 0.25 * (dxx(u, g, node, 2, inv_h2) + dxx(u, g, node, 3, inv_h2));
      H.re12[s] = 0.25 * (dab(u, g, node, 0, 2, inv_4h2) + dab(u, g, node, 1, 3, inv_4h2));
      H.im12[s] = 0.25 * (dab(u, g, node, 0, 3, inv_4h2) - dab(u, g, node, 1, 2, inv_4h2));
    }
  }
  return H;
}

Eigen::MatrixXd hermitian_eigenvalues(const HermitianField& H) {
  const int64_t ni = H.h11.size();
  Eigen::MatrixXd ev(ni, H.n);
  if (H.n == 1) {
    ev.col(0) = H.h11;
    return ev;
  }
  for (int64_t s = 0; s < ni; ++s) {
    const double mean = 0.5 * (H.h11[s] + H.h22[s]);
    const double off = 0.5 * (H.h11[s] - H.h22[s]);
    const double q = std::sqrt(off * off + H.re12[s] * H.re12[s] + H.im12[s] * H.im12[s]);
    ev(s, 0) = mean - q;
    ev(s, 1) = mean + q;
  }
  return ev;
}

LogDetResult logdet_hessian(const HermitianField& H, double floor_delta, bool throw_on_notpsh) {
  require(floor_delta > 0, ErrorCode::InvalidArgument, "eigenvalue floor must be positive");
  const Eigen::MatrixXd ev = hermitian_eigenvalues(H);
  const int64_t ni = ev.rows();

  LogDetResult r;
  r.values.resize(ni);
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int64_t s = 0; s < ni; ++s) {
    double ld = 0;
    for (int j = 0; j < H.n; ++j) {
      const double lam = ev(s, j);
      if (lam < r.min_eigenvalue) {
        r.min_eigenvalue = lam;
        r.worst_node = H.grid->interior_nodes[static_cast<std::size_t>(s)];
      }
      if (lam < floor_delta) {
        ++r.clamp_count;
        ld += std::log(floor_delta);
      } else {
        ld += std::log(lam);
      }
    }
    r.values[s] = ld;
  }
  r.not_psh = r.min_eigenvalue < -10.0 * floor_delta;
  if (r.not_psh && throw_on_notpsh)
    fail(ErrorCode::NotPSH, "Hessian eigenvalue " + std::to_string(r.min_eigenvalue) +
                                " below -10*delta at node " + std::to_string(r.worst_node));
  return r;
}

}  // namespace pcma
