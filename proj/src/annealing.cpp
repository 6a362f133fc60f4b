#include "bps/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bps {

CoolingSchedule CoolingSchedule::log_growth_form(double beta0, double d2, double s0) {
  if (beta0 < 1.0) throw std::invalid_argument("cooling schedule: beta0 must be >= 1");
  if (d2 <= 0.0 || s0 <= 0.0) throw std::invalid_argument("cooling schedule: d2, s0 must be positive");
  CoolingSchedule s;
  s.form = ScheduleForm::log_growth;
  s.beta0 = beta0;
  s.d2 = d2;
  s.s0 = s0;
  // ln(e + t + s0) - ln(e + t) <= s0 / (e + t) <= s0 / t
  s.d1 = d2 * s0;
  return s;
}

CoolingSchedule CoolingSchedule::from_table(std::vector<std::pair<double, double>> steps) {
  if (steps.empty()) throw std::invalid_argument("cooling schedule: empty table");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].second < 1.0) throw std::invalid_argument("cooling schedule: beta must be >= 1");
    if (i > 0 && steps[i].first <= steps[i - 1].first)
      throw std::invalid_argument("cooling schedule: table times must increase");
  }
  if (steps.front().first > 0.0) steps.insert(steps.begin(), {0.0, steps.front().second});
  CoolingSchedule s;
  s.form = ScheduleForm::step_table;
  s.table = std::move(steps);
  s.beta0 = s.table.front().second;
  return s;
}

CoolingSchedule CoolingSchedule::constant(double beta) { return from_table({{0.0, beta}}); }

double beta_at(const CoolingSchedule& sched, double t) {
  if (t < 0) throw std::invalid_argument("beta_at: negative time");
  if (sched.form == ScheduleForm::log_growth)
    return std::max(sched.beta0, sched.d2 * std::log(std::exp(1.0) + t));
  // right-continuous step function
  auto it = std::upper_bound(sched.table.begin(), sched.table.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  return (it - 1)->second;
}

A10Report validate_A10(const CoolingSchedule& sched, double horizon) {
  A10Report rep;
  if (horizon <= 1.0) {
    rep.violations.push_back("horizon too short to certify anything");
    return rep;
  }
  const int n = 2000;
  std::vector<double> ts(n + 1), bs(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = horizon * i / n;
    bs[i] = beta_at(sched, ts[i]);
  }
  if (bs[0] < 1.0) rep.violations.push_back("beta(0) < 1");
  for (int i = 1; i <= n; ++i)
    if (bs[i] < bs[i - 1] - 1e-12) {
      rep.violations.push_back("schedule decreases near t = " + std::to_string(ts[i]));
      break;
    }
  // divergence proxy: the tail of the grid must still be climbing
  if (bs[n] <= bs[n / 2] + 1e-9) rep.violations.push_back("schedule stalls (no divergence)");

  // certify the constants on the grid tail t >= max(1, horizon/100):
  // d1 = sup t (beta(t+s0) - beta(t)), d2 = inf beta(t)/ln t
  const double s0 = sched.s0 > 0 ? sched.s0 : 1.0;
  const double t_lo = std::max(1.0, horizon / 100.0);
  double d1 = 0;
  double d2 = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i <= n; ++i) {
    double t = ts[i];
    if (t < t_lo) continue;
    if (std::log(t) > 0) d2 = std::min(d2, beta_at(sched, t) / std::log(t));
    if (t + s0 <= horizon) {
      any = true;
      d1 = std::max(d1, (beta_at(sched, t + s0) - beta_at(sched, t)) * t);
    }
  }
  if (!any) {
    rep.violations.push_back("no grid point admits the lag-s0 increment check");
  } else if (!(d2 > 0) || !std::isfinite(d2)) {
    rep.violations.push_back("no positive d2 with beta(t) >= d2 ln t");
  } else {
    rep.d2 = d2;
    rep.d1 = std::max(d1, d2);  // hypothesis asks d1 >= d2
    rep.s0 = s0;
  }
  rep.pass = rep.violations.empty();
  return rep;
}

namespace {

// first bounce of the rate t -> beta(t_abs + t) <y, grad U(x + t y)>_+ by
// thinning; the per-window envelope evaluates the schedule at the window's
// right end, an upper bound since beta never decreases
double next_bounce_annealed(const Potential& U, const CoolingSchedule& sched, double t_abs,
                            const Vec& x, const Vec& y, RngStream& rng, double window0,
                            double t_cap, std::size_t* proposals) {
  if (t_cap <= 0 || y.squaredNorm() == 0) return kNoEvent;
  double t_off = 0;
  double w = window0;
  const double w_cap = 64.0 * window0;
  while (t_off < t_cap) {
    double h = std::min(w, t_cap - t_off);
    Vec xc = x + t_off * y;
    double B = beta_at(sched, t_abs + t_off + h) * segment_rate_bound(U, xc, y, h);
    if (B > 0) {
      if (B * h > 4.0) {
        double h2 = 4.0 / B;
        if (h2 < h) {
          h = h2;
          B = beta_at(sched, t_abs + t_off + h) * segment_rate_bound(U, xc, y, h);
        }
      }
      double s = 0;
      for (;;) {
        s += rng.exponential() / B;
        if (s > h) break;
        if (proposals) ++*proposals;
        double r = beta_at(sched, t_abs + t_off + s) * std::max(0.0, y.dot(U.grad(xc + s * y)));
        if (rng.uniform() * B <= r) return t_off + s;
      }
    }
    t_off += h;
    w = std::min(2.0 * w, w_cap);
  }
  return kNoEvent;
}

void validate_config(const AnnealConfig& cfg) {
  if (!cfg.model.U || !cfg.model.law) throw std::invalid_argument("anneal: model incomplete");
  if (!std::isfinite(cfg.model.law->support_radius()))
    throw std::invalid_argument("anneal: velocity law must have bounded support");
  if (cfg.model.lambda_r <= 0) throw std::invalid_argument("anneal: refreshment rate must be positive");
  if (cfg.horizon <= 0) throw std::invalid_argument("anneal: horizon must be positive");
  if (!(cfg.eta > cfg.eta_prime && cfg.eta_prime > 0))
    throw std::invalid_argument("anneal: need eta > eta' > 0");
  if (beta_at(cfg.schedule, 0.0) < 1.0) throw std::invalid_argument("anneal: beta(0) < 1");
}

}  // namespace

Trajectory simulate_annealed(const AnnealConfig& cfg, std::uint64_t seed, std::uint64_t replica) {
  validate_config(cfg);
  const Potential& U = *cfg.model.U;
  const auto chain = static_cast<std::uint32_t>(replica);
  RngStream r_ref(seed, chain, role::refresh_clock);
  RngStream r_bnc(seed, chain, role::bounce);
  RngStream r_vel(seed, chain, role::velocity);

  Vec x = cfg.x0.size() ? cfg.x0 : Vec(Vec::Zero(U.dim()));
  if (x.size() != U.dim()) throw std::invalid_argument("anneal: initial point dimension mismatch");
  Vec y = cfg.model.law->sample(r_vel);

  Trajectory tr;
  double t = 0;
  tr.events.push_back({0.0, x, y, EventKind::start});
  while (t < cfg.horizon) {
    double rem = cfg.horizon - t;
    double tau_r = r_ref.exponential() / cfg.model.lambda_r;
    double cap = std::min(tau_r, rem);
    double tau_b =
        next_bounce_annealed(U, cfg.schedule, t, x, y, r_bnc, cfg.window0, cap, &tr.n_proposals);
    if (tau_b < cap) {
      t += tau_b;
      x += tau_b * y;
      y = reflect(U.grad(x), y);
      tr.events.push_back({t, x, y, EventKind::bounce});
      ++tr.n_bounce;
    } else if (tau_r < rem) {
      t += tau_r;
      x += tau_r * y;
      y = cfg.model.law->sample(r_vel);
      tr.events.push_back({t, x, y, EventKind::refresh});
      ++tr.n_refresh;
    } else {
      x += rem * y;
      t = cfg.horizon;
      tr.events.push_back({t, x, y, EventKind::finish});
    }
  }
  if (tr.events.back().kind != EventKind::finish)
    tr.events.push_back({cfg.horizon, x, y, EventKind::finish});
  return tr;
}

double min_potential_1d(const Potential& U, double lo, double hi) {
  if (U.dim() != 1) throw std::invalid_argument("min_potential_1d: dimension is not one");
  auto f = [&](double s) {
    Vec x(1);
    x[0] = s;
    return U.value(x);
  };
  double arg = minimize_scalar(f, lo, hi, 1e-10);
  return f(arg);
}

double min_potential(const Potential& U) {
  const std::string n = U.name();
  if (n == "gaussian" || n == "zero" || n == "aniso_power") return 0.0;
  if (n == "double_well")
    return std::min(min_potential_1d(U, -2.5, 0.0), min_potential_1d(U, 0.0, 2.5));
  if (U.dim() == 1) return min_potential_1d(U, -64.0, 64.0);
  throw std::invalid_argument("min_potential: no catalogued minimum for " + n);
}

SuccessReport success_prob(const AnnealConfig& cfg, std::size_t runs, std::uint64_t seed) {
  validate_config(cfg);
  SuccessReport rep;
  rep.runs = runs;
  rep.min_u = min_potential(*cfg.model.U);
  rep.u_final.reserve(runs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    Trajectory tr = simulate_annealed(cfg, seed, i);
    double u_end = cfg.model.U->value(tr.events.back().x);
    rep.u_final.push_back(u_end);
    if (u_end <= rep.min_u + cfg.eta) ++hits;
  }
  rep.fraction = runs ? static_cast<double>(hits) / runs : 0.0;
  rep.ci = wilson_interval(hits, runs);
  return rep;
}

double phi2(double s) {
  if (s <= -1.0) return 1.0;
  if (s >= 1.0) return 3.0;
  return 2.0 + 0.5 * (3.0 * s - s * s * s);
}

double phi2_prime(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return 1.5 * (1.0 - s * s);
}

double v2_value(const Potential& U, const Vec& x, const Vec& y) {
  return std::exp(0.5 * U.value(x)) * phi2(y.dot(U.grad(x)));
}

MeanSe a_beta_v2(const Model& m, double beta, const Vec& x, const Vec& y) {
  const Potential& U = *m.U;
  const Vec g = U.grad(x);
  const double theta = y.dot(g);
  const double expu = std::exp(0.5 * U.value(x));
  // transport: y . grad_x V2 = e^{U/2} (theta phi2 / 2 + phi2' <y, Hess y>)
  const double transport = expu * (0.5 * theta * phi2(theta) + phi2_prime(theta) * y.dot(U.hessian(x) * y));
  // bounce at rate beta theta_+, reflection flips the gradient projection
  const double bounce = beta * std::max(0.0, theta) * expu * (phi2(-theta) - phi2(theta));
  // refreshment: lambda_r (E[phi2(<G, grad U>)] - phi2(theta)) e^{U/2}
  MeanSe ref = m.law->expect_along(g, [](double s) { return phi2(s); });
  const double refresh = m.lambda_r * expu * (ref.mean - phi2(theta));
  return {transport + bounce + refresh, m.lambda_r * expu * ref.se, ref.n};
}

V2Report check_v2_bound(const Model& m, const std::vector<double>& betas, std::size_t n_points,
                        double radius, std::uint64_t seed) {
  if (betas.empty()) throw std::invalid_argument("check_v2_bound: no temperatures");
  V2Report rep;
  rep.n_points = n_points;
  const int d = m.U->dim();
  RngStream rng(seed, 0, role::init);
  std::vector<Vec> xs, ys;
  xs.reserve(n_points);
  ys.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    Vec x = rng.normal_vec(d);
    if (x.norm() > 0) x *= radius * std::pow(rng.uniform(), 1.0 / d) / x.norm();
    xs.push_back(x);
    ys.push_back(m.law->sample(rng));
  }
  double a3 = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    MeanSe av = a_beta_v2(m, betas.front(), xs[i], ys[i]);
    a3 = std::max(a3, (av.mean + 3.0 * av.se) / v2_value(*m.U, xs[i], ys[i]));
  }
  rep.a3 = a3;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 1; b < betas.size(); ++b)
    for (std::size_t i = 0; i < n_points; ++i) {
      double v2 = v2_value(*m.U, xs[i], ys[i]);
      MeanSe av = a_beta_v2(m, betas[b], xs[i], ys[i]);
      worst = std::max(worst, (av.mean - 3.0 * av.se - a3 * v2) / v2);
    }
  rep.worst_excess = betas.size() > 1 ? worst : 0.0;
  rep.pass = rep.worst_excess <= 1e-9;
  return rep;
}

}  // namespace bps
