#include "bps/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bps {

Vec reflect(const Vec& grad, const Vec& y) {
  double n2 = grad.squaredNorm();
  if (n2 == 0) return y;
  return y - (2.0 * y.dot(grad) / n2) * grad;
}

double next_bounce(const Potential& U, const Vec& x, const Vec& y, RngStream& rng,
                   double window0, double t_cap, std::size_t* proposals) {
  if (window0 <= 0) throw std::invalid_argument("next_bounce: window must be positive");
  if (t_cap <= 0 || y.squaredNorm() == 0) return kNoEvent;
  double t_off = 0;
  double w = window0;
  const double w_cap = 64.0 * window0;
  while (t_off < t_cap) {
    double h = std::min(w, t_cap - t_off);
    Vec xc = x + t_off * y;
    double B = segment_rate_bound(U, xc, y, h);
    if (B > 0) {
      // keep the expected proposal count per window moderate; shrinking the
      // window keeps the envelope valid (sup over a subinterval)
      if (B * h > 4.0) {
        double h2 = 4.0 / B;
        if (h2 < h) {
          h = h2;
          B = segment_rate_bound(U, xc, y, h);
        }
      }
      double s = 0;
      for (;;) {
        s += rng.exponential() / B;
        if (s > h) break;
        if (proposals) ++*proposals;
        double r = std::max(0.0, y.dot(U.grad(xc + s * y)));
        if (rng.uniform() * B <= r) return t_off + s;
      }
    }
    t_off += h;
    w = std::min(2.0 * w, w_cap);
  }
  return kNoEvent;
}

namespace {

// certified sign decomposition of g(s) = <y, grad U(x + s y)> on [a, b]:
// emits the (possibly fragmented) subintervals where g > 0, left to right.
// A cell is resolved once the slope envelope proves the sign constant;
// otherwise it splits. emit returns false to abort the scan early.
bool scan_positive(const Potential& U, const Vec& x, const Vec& y, double yn2, double a,
                   double ga, double b, double gb,
                   const std::function<bool(double, double)>& emit, int depth) {
  double w = b - a;
  double reach = yn2 * U.hessian_norm_bound(x + a * y, y, w) * w;
  bool certain = (std::abs(ga) > reach) || (std::abs(gb) > reach) || (reach == 0.0);
  if (certain) {
    double ref = (std::abs(ga) > reach) ? ga : ((std::abs(gb) > reach) ? gb : ga);
    if (ref > 0) return emit(a, b);
    return true;
  }
  if (depth >= 48 || w < 1e-13 * (1.0 + std::abs(b))) {
    // unresolved sliver straddling a root; its contribution is negligible
    double gm = y.dot(U.grad(x + 0.5 * (a + b) * y));
    if (gm > 0) return emit(a, b);
    return true;
  }
  double m = 0.5 * (a + b);
  double gm = y.dot(U.grad(x + m * y));
  if (!scan_positive(U, x, y, yn2, a, ga, m, gm, emit, depth + 1)) return false;
  return scan_positive(U, x, y, yn2, m, gm, b, gb, emit, depth + 1);
}

void scan_ray(const Potential& U, const Vec& x, const Vec& y, double t_cap,
              const std::function<bool(double, double)>& emit) {
  double yn2 = y.squaredNorm();
  if (yn2 == 0 || t_cap <= 0) return;
  auto g = [&](double s) { return y.dot(U.grad(x + s * y)); };
  double block = 1.0;
  double t0 = 0;
  while (t0 < t_cap) {
    double t1 = std::min(t0 + block, t_cap);
    // seed the recursion with a handful of uniform cells
    const int cells = 8;
    double prev = t0, gprev = g(prev);
    for (int c = 1; c <= cells; ++c) {
      double cur = t0 + (t1 - t0) * c / cells;
      double gcur = g(cur);
      if (!scan_positive(U, x, y, yn2, prev, gprev, cur, gcur, emit, 0)) return;
      prev = cur;
      gprev = gcur;
    }
    t0 = t1;
    block = std::min(2.0 * block, 16.0);
  }
}

}  // namespace

double integrated_rate(const Potential& U, const Vec& x, const Vec& y, double t) {
  double total = 0;
  scan_ray(U, x, y, t, [&](double a, double b) {
    total += U.value(x + b * y) - U.value(x + a * y);
    return true;
  });
  return std::max(0.0, total);
}

double next_bounce_inverse(const Potential& U, const Vec& x, const Vec& y, double budget,
                           double t_cap, double* consumed) {
  if (budget < 0) throw std::invalid_argument("next_bounce_inverse: negative budget");
  if (budget == 0) {
    if (consumed) *consumed = 0.0;
    return 0.0;
  }
  double cum = 0;
  double hit = kNoEvent;
  scan_ray(U, x, y, t_cap, [&](double a, double b) {
    double ua = U.value(x + a * y);
    double ub = U.value(x + b * y);
    double inc = ub - ua;
    if (cum + inc >= budget) {
      double target = ua + (budget - cum);
      // U is increasing along this piece: monotone root solve
      if (target <= ua) {
        hit = a;
      } else if (target >= ub) {
        hit = b;
      } else {
        hit = find_root([&](double s) { return U.value(x + s * y) - target; }, a, b, 1e-14);
      }
      cum = budget;
      return false;
    }
    cum += std::max(0.0, inc);
    return true;
  });
  if (consumed) *consumed = cum;
  return hit;
}

Trajectory simulate(const Model& m, const Vec& x0, const Vec& y0, const SimConfig& cfg) {
  if (x0.size() != m.U->dim() || y0.size() != m.U->dim() || m.law->dim() != m.U->dim())
    throw std::invalid_argument("simulate: dimension mismatch");
  if (m.lambda_r < 0) throw std::invalid_argument("simulate: negative refreshment rate");
  RngStream r_ref(cfg.seed, cfg.chain, role::refresh_clock);
  RngStream r_bnc(cfg.seed, cfg.chain, role::bounce);
  RngStream r_vel(cfg.seed, cfg.chain, role::velocity);

  Trajectory tr;
  Vec x = x0, y = y0;
  double t = 0;
  tr.events.push_back({0.0, x, y, EventKind::start});
  while (t < cfg.t_max) {
    double rem = cfg.t_max - t;
    double tau_r = m.lambda_r > 0 ? r_ref.exponential() / m.lambda_r : kNoEvent;
    double cap = std::min(tau_r, rem);
    double tau_b = next_bounce(*m.U, x, y, r_bnc, cfg.window0, cap, &tr.n_proposals);
    if (tau_b < cap) {
      t += tau_b;
      x += tau_b * y;
      y = reflect(m.U->grad(x), y);
      tr.events.push_back({t, x, y, EventKind::bounce});
      ++tr.n_bounce;
    } else if (tau_r < rem) {
      t += tau_r;
      x += tau_r * y;
      y = m.law->sample(r_vel);
      tr.events.push_back({t, x, y, EventKind::refresh});
      ++tr.n_refresh;
    } else {
      x += rem * y;
      t = cfg.t_max;
      tr.events.push_back({t, x, y, EventKind::finish});
    }
  }
  if (tr.events.back().kind != EventKind::finish)
    tr.events.push_back({cfg.t_max, x, y, EventKind::finish});
  return tr;
}

Trajectory simulate_global(const Model& m, const Vec& x0, const Vec& y0, const SimConfig& cfg) {
  if (x0.size() != m.U->dim() || y0.size() != m.U->dim() || m.law->dim() != m.U->dim())
    throw std::invalid_argument("simulate_global: dimension mismatch");
  if (m.lambda_r < 0) throw std::invalid_argument("simulate_global: negative refreshment rate");
  RngStream r_clk(cfg.seed, cfg.chain, role::global_clock);
  RngStream r_vel(cfg.seed, cfg.chain, role::velocity);

  Trajectory tr;
  Vec x = x0, y = y0;
  double t = 0;
  tr.events.push_back({0.0, x, y, EventKind::start});
  double w = cfg.window0;
  const double w_cap = 64.0 * cfg.window0;
  while (cfg.t_max - t > 0) {
    double h = std::min(w, cfg.t_max - t);
    double B = segment_rate_bound(*m.U, x, y, h) + m.lambda_r;
    if (B <= 0) {
      x += h * y;
      t += h;
      w = std::min(2.0 * w, w_cap);
      continue;
    }
    if (B * h > 4.0) {
      double h2 = 4.0 / B;
      if (h2 < h) {
        h = h2;
        B = segment_rate_bound(*m.U, x, y, h) + m.lambda_r;
      }
    }
    double s = 0;
    bool fired = false;
    for (;;) {
      s += r_clk.exponential() / B;
      if (s > h) break;
      ++tr.n_proposals;
      double u = r_clk.uniform() * B;
      if (u < m.lambda_r) {
        t += s;
        x += s * y;
        y = m.law->sample(r_vel);
        tr.events.push_back({t, x, y, EventKind::refresh});
        ++tr.n_refresh;
        fired = true;
        break;
      }
      double rb = std::max(0.0, y.dot(m.U->grad(x + s * y)));
      if (u < m.lambda_r + rb) {
        t += s;
        x += s * y;
        y = reflect(m.U->grad(x), y);
        tr.events.push_back({t, x, y, EventKind::bounce});
        ++tr.n_bounce;
        fired = true;
        break;
      }
    }
    if (!fired) {
      x += h * y;
      t += h;
      w = std::min(2.0 * w, w_cap);
    }
  }
  double rem = cfg.t_max - t;
  if (rem > 0) x += rem * y;
  tr.events.push_back({cfg.t_max, x, y, EventKind::finish});
  return tr;
}

std::pair<Vec, Vec> state_at(const Trajectory& tr, double t) {
  if (tr.events.empty()) throw std::invalid_argument("state_at: empty trajectory");
  if (t <= tr.events.front().t) return {tr.events.front().x, tr.events.front().y};
  if (t >= tr.events.back().t) return {tr.events.back().x, tr.events.back().y};
  auto it = std::upper_bound(tr.events.begin(), tr.events.end(), t,
                             [](double v, const Event& e) { return v < e.t; });
  const Event& e = *(it - 1);
  return {e.x + (t - e.t) * e.y, e.y};
}

MeanSe time_average(const Trajectory& tr, const std::function<double(const Vec&, const Vec&)>& f,
                    double burn_in, int n_batches) {
  double T = tr.t_end();
  if (T <= burn_in) throw std::invalid_argument("time_average: burn-in exceeds the horizon");
  if (n_batches < 2) n_batches = 2;
  const auto& gl = gauss_legendre(8);
  const auto& ev = tr.events;

  // integral of f over [a, b] inside the linear segment starting at ev[i]
  auto seg_int = [&](std::size_t i, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      double tt = mid + half * gl.x[k];
      s += gl.w[k] * f(ev[i].x + (tt - ev[i].t) * ev[i].y, ev[i].y);
    }
    return s * half;
  };

  double total = T - burn_in;
  std::vector<double> bm(n_batches);
  for (int k = 0; k < n_batches; ++k) {
    double a = burn_in + total * k / n_batches;
    double b = burn_in + total * (k + 1) / n_batches;
    auto it = std::upper_bound(ev.begin(), ev.end(), a,
                               [](double v, const Event& e) { return v < e.t; });
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - ev.begin()) - 1));
    double s = 0;
    for (; i + 1 < ev.size() && ev[i].t < b; ++i) {
      double lo = std::max(a, ev[i].t), hi = std::min(b, ev[i + 1].t);
      if (hi > lo) s += seg_int(i, lo, hi);
    }
    bm[k] = s / (b - a);
  }
  MeanSe r = mean_se(bm);
  return {r.mean, r.se, static_cast<std::size_t>(n_batches)};
}

MeanSe apply_generator(const Model& m, const std::function<double(const Vec&, const Vec&)>& f,
                       const Vec& x, const Vec& y, const GeneratorOptions& opt) {
  // transport term by central differences
  double transport = 0;
  Vec xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    if (y[i] == 0) continue;
    xp[i] = x[i] + opt.fd_step;
    xm[i] = x[i] - opt.fd_step;
    transport += y[i] * (f(xp, y) - f(xm, y)) / (2.0 * opt.fd_step);
    xp[i] = x[i];
    xm[i] = x[i];
  }

  Vec g = m.U->grad(x);
  double rate = std::max(0.0, y.dot(g));
  double fx = f(x, y);
  double bounce_term = rate > 0 ? rate * (f(x, reflect(g, y)) - fx) : 0.0;

  double refresh_term = 0, refresh_se = 0;
  if (m.lambda_r > 0) {
    RngStream rng(opt.seed, 0, role::mc);
    double s = 0, s2 = 0;
    for (int k = 0; k < opt.n_refresh_mc; ++k) {
      double v = f(x, m.law->sample(rng));
      s += v;
      s2 += v * v;
    }
    double n = opt.n_refresh_mc;
    double mean = s / n;
    double var = std::max(0.0, s2 / n - mean * mean);
    refresh_term = m.lambda_r * (mean - fx);
    refresh_se = m.lambda_r * std::sqrt(var / n);
  }

  return {transport + bounce_term + refresh_term, refresh_se,
          static_cast<std::size_t>(opt.n_refresh_mc)};
}

}  // namespace bps
