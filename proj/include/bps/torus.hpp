#pragma once

#include <cstdint>
#include <vector>

#include "bps/coupling.hpp"
#include "bps/core.hpp"

namespace bps {

// flat torus with one unit period and d-1 periods of length eta; the target
// is uniform (zero potential), so the sampler is refreshment-only and every
// leg is a straight line folded back into the fundamental domain

struct TorusGeom {
  int d;
  double eta;

  TorusGeom(int d_, double eta_);
  double period(int i) const { return i == 0 ? 1.0 : eta; }
  // norm cap used by the explicit bound: ||x|| <= (1 + eta^2 (d-1))^{1/2}
  double diameter_bound() const;
};

// componentwise fold into [0, period)
Vec proj_torus(const TorusGeom& g, const Vec& x);

// shortest representative of a - b, componentwise in [-period/2, period/2]
Vec torus_diff(const TorusGeom& g, const Vec& a, const Vec& b);

// explicit total-variation bound: 2 [ P(N_t <= 1)
//   + E 1_{N_t >= 2} (1 - 2 Phi(-diam / (2 (S_{N_t} - S_1)))) ].
// The Poisson tail term is exact; the expectation is Monte Carlo over the
// first and last arrival gaps (independent exponentials given N_t >= 2).
MeanSe prop1_bound(const TorusGeom& g, double lambda_r, double t, std::size_t n_mc,
                   std::uint64_t seed = 7);

// coupled pair driven by one Poisson clock: velocities are read off a
// reflection-coupled pair of Brownian paths at squared elapsed-refresh times,
// so the chains share every position increment once the 1D separation
// component has crossed zero; merge happens at the first refresh after the
// crossing (never before the second refresh)
MergeReport couple_torus_pair(const TorusGeom& g, double lambda_r, const Vec& x1, const Vec& y1,
                              const Vec& x2, const Vec& y2, double horizon, std::uint64_t seed,
                              std::uint64_t pair_index = 0);

// dimension sweep: smallest horizon whose empirical TV bound drops to the
// target 1 - eps, by doubling + bisection (5% relative tolerance), plus the
// log-log regression slope of that horizon against the dimension
struct ScalingPoint {
  int d;
  double t_c;
  bool censored;
};
struct ScalingResult {
  std::vector<ScalingPoint> points;
  double exponent;  // least-squares slope over the uncensored points
};
ScalingResult scaling_experiment(double eta, double lambda_r, const std::vector<int>& dims,
                                 double eps, std::size_t n_rep = 800, std::uint64_t seed = 19);

}  // namespace bps
