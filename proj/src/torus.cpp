#include "bps/torus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bps {

TorusGeom::TorusGeom(int d_, double eta_) : d(d_), eta(eta_) {
  if (d < 2) throw std::invalid_argument("TorusGeom: need d >= 2");
  if (!(eta > 0)) throw std::invalid_argument("TorusGeom: need eta > 0");
}

double TorusGeom::diameter_bound() const { return std::sqrt(1.0 + eta * eta * (d - 1)); }

Vec proj_torus(const TorusGeom& g, const Vec& x) {
  if (x.size() != g.d) throw std::invalid_argument("proj_torus: dimension mismatch");
  Vec out(g.d);
  for (int i = 0; i < g.d; ++i) {
    double p = g.period(i);
    out[i] = x[i] - p * std::floor(x[i] / p);
    if (out[i] >= p) out[i] = 0.0;  // guard the floor rounding edge
  }
  return out;
}

Vec torus_diff(const TorusGeom& g, const Vec& a, const Vec& b) {
  Vec out(g.d);
  for (int i = 0; i < g.d; ++i) out[i] = std::remainder(a[i] - b[i], g.period(i));
  return out;
}

MeanSe prop1_bound(const TorusGeom& g, double lambda_r, double t, std::size_t n_mc,
                   std::uint64_t seed) {
  if (t < 0 || lambda_r <= 0) throw std::invalid_argument("prop1_bound: bad rate or time");
  double lt = lambda_r * t;
  double tail_le_1 = std::exp(-lt) * (1.0 + lt);
  if (n_mc == 0) throw std::invalid_argument("prop1_bound: empty sample");

  // given N_t >= 2, the first arrival gap and the gap back from t are
  // independent Exp(lambda_r) restricted to summing below t; the span
  // S_{N_t} - S_1 is t minus both gaps
  double diam = g.diameter_bound();
  RngStream rng(seed, 0, role::mc);
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    double a = rng.exponential() / lambda_r;
    double b = rng.exponential() / lambda_r;
    if (a + b >= t) continue;
    double span = t - a - b;
    double v = 1.0 - 2.0 * norm_cdf(-diam / (2.0 * span));
    sum += v;
    sum2 += v * v;
  }
  auto nn = static_cast<double>(n_mc);
  double mean = sum / nn;
  double var = std::max(0.0, sum2 / nn - mean * mean);
  return {2.0 * (tail_le_1 + mean), 2.0 * std::sqrt(var / nn), n_mc};
}

MergeReport couple_torus_pair(const TorusGeom& g, double lambda_r, const Vec& x1, const Vec& y1,
                              const Vec& x2, const Vec& y2, double horizon, std::uint64_t seed,
                              std::uint64_t pair_index) {
  if (lambda_r <= 0 || horizon < 0) throw std::invalid_argument("couple_torus_pair: bad args");
  auto chain = static_cast<std::uint32_t>(pair_index);
  RngStream clock(seed, chain, role::refresh_clock);
  RngStream incr(seed, chain, role::shared_gauss);
  RngStream bridge(seed, chain, role::bridge);

  MergeReport rep;
  rep.seed = seed;

  // shared refreshment times inside the horizon
  std::vector<double> s;
  double acc = clock.exponential() / lambda_r;
  while (acc <= horizon) {
    s.push_back(acc);
    acc += clock.exponential() / lambda_r;
  }
  double s_next = acc;  // first arrival beyond the horizon

  Vec p1 = proj_torus(g, x1), p2 = proj_torus(g, x2);
  if (s.empty()) {
    rep.x1 = proj_torus(g, p1 + horizon * y1);
    rep.y1 = y1;
    rep.x2 = proj_torus(g, p2 + horizon * y2);
    rep.y2 = y2;
    return rep;
  }

  // drift to the first refresh with the initial velocities
  p1 = proj_torus(g, p1 + s[0] * y1);
  p2 = proj_torus(g, p2 + s[0] * y2);

  Vec delta = torus_diff(g, p1, p2);
  double lc = delta.norm() / 2.0;
  Vec e = lc > 0 ? Vec(delta / (2.0 * lc)) : Vec(Vec::Zero(g.d));

  // Brownian pair at squared elapsed times tau_i = (s_i - s_1)^2: the
  // e-component of the second path is mirrored until the separation
  // component first crosses the half-distance level, synchronous afterwards
  bool crossed = false;
  double level_pos = 0.0;  // -W·e so far; crossing when it reaches lc
  Vec v1 = y1, v2 = y2;
  double prev_t = s[0], prev_tau = 0.0;

  std::size_t n_legs = s.size();
  for (std::size_t i = 1; i <= n_legs; ++i) {
    double t_i = i < n_legs ? s[i] : s_next;
    double tau_i = (t_i - s[0]) * (t_i - s[0]);
    double dtau = tau_i - prev_tau;
    double ds = t_i - prev_t;
    Vec dw = std::sqrt(dtau) * incr.normal_vec(g.d);

    bool crossed_now = false;
    double level_prev = level_pos;
    if (!crossed) {
      double b_new = level_pos - dw.dot(e);
      if (b_new >= lc) {
        crossed_now = true;
      } else {
        double p_cross = std::exp(-2.0 * (lc - level_pos) * (lc - b_new) / dtau);
        crossed_now = bridge.uniform() < p_cross;
      }
      level_pos = b_new;
    }

    v1 = dw / ds;
    if (crossed) {
      v2 = v1;
    } else if (crossed_now) {
      // once the level is hit, the mirrored path runs synchronously shifted
      // by the full separation, so this leg closes the remaining gap exactly
      v2 = (dw + 2.0 * (lc - level_prev) * e) / ds;
    } else {
      v2 = (dw - 2.0 * dw.dot(e) * e) / ds;
    }

    p1 = proj_torus(g, p1 + ds * v1);
    if (crossed) {
      p2 = p1;
    } else {
      p2 = proj_torus(g, p2 + ds * v2);
      if (crossed_now) {
        crossed = true;
        p2 = p1;  // analytically exact; snap away the rounding noise
        if (i < n_legs) {
          rep.merged = true;
          rep.merge_time = t_i;
        }
      }
    }
    prev_t = t_i;
    prev_tau = tau_i;
  }

  // the last computed leg runs beyond the horizon: roll back to t
  double overshoot = prev_t - horizon;
  rep.x1 = proj_torus(g, p1 - overshoot * v1);
  rep.y1 = v1;
  rep.x2 = proj_torus(g, p2 - overshoot * v2);
  rep.y2 = v2;
  rep.lemma_merge = crossed;
  return rep;
}

ScalingResult scaling_experiment(double eta, double lambda_r, const std::vector<int>& dims,
                                 double eps, std::size_t n_rep, std::uint64_t seed) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("scaling_experiment: eps in (0,1)");
  if (dims.empty()) throw std::invalid_argument("scaling_experiment: no dimensions");
  double target = 1.0 - eps;

  ScalingResult out;
  std::uint64_t eval_salt = 0;
  for (int d : dims) {
    TorusGeom g(d, eta);
    // antipodal starting positions, velocities at rest until the first refresh
    Vec a = Vec::Zero(d), b(d);
    for (int i = 0; i < d; ++i) b[i] = g.period(i) / 2.0;
    Vec zero = Vec::Zero(d);

    auto tv_at = [&](double t, std::uint64_t salt) {
      std::size_t merged = 0;
      for (std::size_t k = 0; k < n_rep; ++k) {
        MergeReport r = couple_torus_pair(g, lambda_r, a, zero, b, zero, t, seed + salt, k);
        merged += r.merged ? 1 : 0;
      }
      return 2.0 * (1.0 - static_cast<double>(merged) / static_cast<double>(n_rep));
    };

    double hi = std::sqrt(static_cast<double>(d));
    bool ok = false;
    for (int attempt = 0; attempt < 14; ++attempt) {
      if (tv_at(hi, ++eval_salt) <= target) {
        ok = true;
        break;
      }
      hi *= 2.0;
    }
    if (!ok) {
      out.points.push_back({d, hi, true});
      continue;
    }
    double lo = 0.0;
    while (hi - lo > 0.05 * hi) {
      double mid = 0.5 * (lo + hi);
      if (tv_at(mid, ++eval_salt) <= target)
        hi = mid;
      else
        lo = mid;
    }
    out.points.push_back({d, hi, false});
  }

  // log-log regression over the uncensored points
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : out.points) {
    if (p.censored) continue;
    double lx = std::log(static_cast<double>(p.d)), ly = std::log(p.t_c);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  out.exponent = n >= 2 ? (sxy - sx * sy / n) / (sxx - sx * sx / n)
                        : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace bps
