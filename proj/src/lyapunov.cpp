#include "bps/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bps {

// ---------------------------------------------------------------------------
// parameter engine

DriftParamsExact derive_params_exact(const Rat& c1, const Rat& c2, const Rat& c3, const Rat& c4,
                                     const Rat& r, const Rat& delta, const Rat& lambda_r) {
  for (const Rat* v : {&c1, &c2, &c3, &c4, &r, &delta, &lambda_r})
    if (*v <= 0) throw std::invalid_argument("derive_params: inputs must be positive");

  QNum one(Rat(1));
  QNum b1 = min(QNum(Rat(1, 3)), QNum(lambda_r * delta * r * c1 / (16 * c4)));
  QNum b2 = min(QNum(c3 / (4 * c2)), QNum::sqrt_of(lambda_r * delta * c3 * c1 / (100 * r)));

  QNum a = min(one, (b1 * b2).inverse());
  QNum bma = a * b1;
  QNum b = a + bma;
  QNum kappa = bma * b2;

  QNum t1 = QNum(delta * lambda_r) * a / QNum(4 * (4 * c4 / (r * c2) + 2 * lambda_r));
  QNum t3 = bma * QNum(c3) / (kappa * QNum(4 * c2));
  QNum t4 = QNum(delta) * b / QNum(Rat(4));
  QNum cmb = min(min(t1, bma), min(t3, t4));
  QNum c = b + cmb;

  QNum eps = min(min(QNum(Rat(1, 2)), cmb), min(kappa * QNum(r * c1 / 4), QNum(lambda_r * c2)));

  QNum lhs = max(QNum(16 * lambda_r * c2 / (r * c1)), QNum(64 * c4 * c2 / (r * c1 * r * c1)));
  bool cond13 = lhs <= b1 * b2;

  return {a, b, c, kappa, eps, cond13};
}

DriftParams derive_params(double c1, double c2, double c3, double c4, double r, double delta,
                          double lambda_r) {
  DriftParamsExact e =
      derive_params_exact(rat_from_double(c1), rat_from_double(c2), rat_from_double(c3),
                          rat_from_double(c4), rat_from_double(r), rat_from_double(delta),
                          rat_from_double(lambda_r));
  return {e.a.to_double(), e.b.to_double(), e.c.to_double(), e.kappa.to_double(),
          e.eps.to_double(), e.condition13};
}

// ---------------------------------------------------------------------------
// phi

void PhiFunction::push(double hi, double m1) {
  if (segs_.empty()) {
    segs_.push_back({-2.0, hi, 1.0, 0.0, m1});
    return;
  }
  const Seg& p = segs_.back();
  double w = p.hi - p.lo;
  double v = p.v0 + 0.5 * (p.m0 + p.m1) * w;
  segs_.push_back({p.hi, hi, v, p.m1, m1});
}

double PhiFunction::operator()(double s) const {
  if (segs_.empty() || s <= -2.0) return 1.0;
  const Seg& last = segs_.back();
  if (s >= last.hi) return last.v0 + 0.5 * (last.m0 + last.m1) * (last.hi - last.lo);
  auto it = std::upper_bound(segs_.begin(), segs_.end(), s,
                             [](double v, const Seg& g) { return v < g.hi; });
  const Seg& g = *it;
  double t = s - g.lo, w = g.hi - g.lo;
  return g.v0 + g.m0 * t + 0.5 * (g.m1 - g.m0) * t * t / w;
}

double PhiFunction::prime(double s) const {
  if (segs_.empty() || s <= -2.0) return 0.0;
  if (s >= segs_.back().hi) return 0.0;
  auto it = std::upper_bound(segs_.begin(), segs_.end(), s,
                             [](double v, const Seg& g) { return v < g.hi; });
  const Seg& g = *it;
  return g.m0 + (g.m1 - g.m0) * (s - g.lo) / (g.hi - g.lo);
}

bool PhiFunction::scan_ok() const {
  const int n = 10000;
  const double slack = 1e-9;
  double prev = 1.0;
  for (int i = 0; i <= n; ++i) {
    double s = -2.5 + 4.0 * i / n;
    double v = (*this)(s);
    if (v < prev - 1e-12) return false;  // monotone
    prev = v;
    if (s <= -2.0) {
      if (std::abs(v - 1.0) > 1e-12) return false;
    } else if (s < -1.0) {
      double center = 1.0 + a_ * (s + 2.0);
      if (v < center - eps_ - slack || v > center + eps_ + slack) return false;
      if (prime(s) > a_ + eps_ + slack) return false;
    } else if (s <= 0.0) {
      if (std::abs(v - (1.0 + b_ + s * (b_ - a_))) > 1e-10) return false;
    } else if (s < 1.0) {
      double center = 1.0 + b_ + s * (c_ - b_);
      if (v < center - eps_ - slack || v > center + eps_ + slack) return false;
      if (s >= w1_ && prime(s) > c_ - b_ + eps_ + slack) return false;
    } else {
      if (std::abs(v - (1.0 + c_)) > 1e-10) return false;
    }
  }
  return true;
}

PhiFunction::PhiFunction(double a, double b, double c, double eps) : a_(a), b_(b), c_(c), eps_(eps) {
  if (!(0 <= c - b + 1e-15 && c - b <= b - a + 1e-15 && b - a <= a + 1e-15))
    throw std::invalid_argument("phi: band constants must satisfy 0 <= c-b <= b-a <= a");
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("phi: eps outside (0,1]");
  if (a == 0) {  // fully degenerate: constant 1
    b_ = c_ = 0;
    return;
  }
  double bma = b - a, cmb = c - b;

  for (int attempt = 0; attempt < 60; ++attempt) {
    segs_.clear();
    double shrink = std::pow(0.5, attempt);

    // (-2,-1): slope 0 -> L -> (b-a), area a, sup slope <= a+eps
    double wl = shrink * std::min(0.25, eps / (2.0 * (a + eps)));
    double L = (a - wl * bma / 2.0) / (1.0 - wl);
    push(-2.0 + wl, L);
    push(-1.0 - wl, L);
    push(-1.0, bma);

    // [-1,0]: exact affine
    push(0.0, bma);

    // (0,1): slope (b-a) -> L2 -> 0, area c-b, cap waived on [0,w1)
    if (cmb <= 0 && bma > 0) {
      // cap and C^1 cannot coexist: constant branch with a derivative kink
      kink_ = true;
      w1_ = 0;
      segs_.back().m1 = bma;  // left limit stays b-a
      segs_.push_back({0.0, 1.0, operator()(0.0), 0.0, 0.0});
    } else if (bma == 0) {
      w1_ = 0;
      push(1.0, 0.0);  // slope 0 -> 0, area 0 = c-b
    } else {
      double w1 = shrink * std::min({0.25, eps / (2.0 * bma + eps), cmb / bma});
      double w3 = shrink * std::min(0.25, eps / (2.0 * (cmb + eps)));
      double L2 = (cmb - w1 * bma / 2.0) / (1.0 - 0.5 * (w1 + w3));
      if (L2 < 0) L2 = 0;
      w1_ = w1;
      push(w1, L2);
      push(1.0 - w3, L2);
      push(1.0, 0.0);
    }

    if (scan_ok()) return;
  }
  throw std::runtime_error("phi: band construction failed to converge");
}

// ---------------------------------------------------------------------------
// spec evaluation

LyapunovSpec finalize_spec(LyapunovSpec spec, double lambda_r) {
  DriftParams p =
      derive_params(spec.c1, spec.c2, spec.c3, spec.c4, spec.r, spec.delta, lambda_r);
  spec.a = p.a;
  spec.b = p.b;
  spec.c = p.c;
  spec.kappa = p.kappa;
  spec.eps = p.eps;
  spec.condition13 = p.condition13;
  spec.phi = std::make_shared<PhiFunction>(p.a, p.b, p.c, p.eps);
  return spec;
}

double u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x) {
  double u = U.value(x);
  if (s.psi == PsiChoice::identity) return u;
  if (u <= 0) throw std::domain_error("u_bar: power transform needs a positive potential");
  return std::pow(u, s.varsigma);
}

Vec grad_u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x) {
  Vec g = U.grad(x);
  if (s.psi == PsiChoice::identity) return g;
  double u = U.value(x);
  if (u <= 0) throw std::domain_error("u_bar: power transform needs a positive potential");
  return s.varsigma * std::pow(u, s.varsigma - 1.0) * g;
}

Mat hess_u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x) {
  Mat h = U.hessian(x);
  if (s.psi == PsiChoice::identity) return h;
  double u = U.value(x);
  if (u <= 0) throw std::domain_error("u_bar: power transform needs a positive potential");
  Vec g = U.grad(x);
  double vs = s.varsigma;
  return vs * std::pow(u, vs - 1.0) * h +
         vs * (vs - 1.0) * std::pow(u, vs - 2.0) * (g * g.transpose());
}

double ell_of(const LyapunovSpec& s, const Potential& U, const Vec& x) {
  switch (s.ellkind) {
    case EllChoice::one: return 1.0;
    case EllChoice::constant: return s.ell_value;
    case EllChoice::inv_grad_bar: return 1.0 / (1.0 + grad_u_bar(s, U, x).norm());
  }
  return 1.0;
}

Vec grad_ell(const LyapunovSpec& s, const Potential& U, const Vec& x) {
  if (s.ellkind != EllChoice::inv_grad_bar) return Vec::Zero(x.size());
  Vec g = grad_u_bar(s, U, x);
  double n = g.norm();
  if (n == 0) return Vec::Zero(x.size());
  Vec grad_norm = hess_u_bar(s, U, x) * g / n;
  double d = 1.0 + n;
  return -grad_norm / (d * d);
}

double h_of(const LyapunovSpec& s, double t) {
  return (s.hkind == HChoice::square ? 1.0 : s.eta) * t * t;
}

bool in_A_x(const LyapunovSpec& s, const Potential& U, const Vec& x, const Vec& y) {
  return h_of(s, y.norm()) <= 3.0 * u_bar(s, U, x);
}

double a_x_sq_bound(const LyapunovSpec& s, const Model& m, const Vec& x) {
  double eta = s.hkind == HChoice::square ? 1.0 : s.eta;
  double cap = 3.0 * u_bar(s, *m.U, x) / eta;  // ||y||^2 <= cap inside A_x
  if (cap < 0) cap = 0;
  double sup = m.law->support_radius();
  if (std::isfinite(sup)) cap = std::min(cap, sup * sup);
  return cap;
}

double eval_V(const LyapunovSpec& s, const Model& m, const Vec& x, const Vec& y,
              bool with_h_part) {
  const Potential& U = *m.U;
  double ub = u_bar(s, U, x);
  double ell = ell_of(s, U, x);
  double theta = grad_u_bar(s, U, x).dot(y);
  double arg = 2.0 * ell * theta / (s.r * s.c1);
  double v = std::exp(s.kappa * ub) * (*s.phi)(arg);
  if (with_h_part) v += std::exp(h_of(s, y.norm()));
  return v;
}

MeanSe drift_residual(const LyapunovSpec& s, const Model& m, const Vec& x, const Vec& y) {
  const Potential& U = *m.U;
  const PhiFunction& phi = *s.phi;
  double ub = u_bar(s, U, x);
  Vec gub = grad_u_bar(s, U, x);
  double gub_norm = gub.norm();
  double ell = ell_of(s, U, x);
  Vec gell = grad_ell(s, U, x);
  double theta = gub.dot(y);
  double scale = 2.0 * ell / (s.r * s.c1);
  double arg = scale * theta;

  // transport, bounce and refreshment contributions to the phi part
  double j = s.kappa * theta * phi(arg);
  j += (2.0 / (s.r * s.c1)) * phi.prime(arg) *
       (ell * y.dot(hess_u_bar(s, U, x) * y) + theta * gell.dot(y));
  if (theta > 0 && gub_norm > 0)
    j += (U.grad(x).norm() / gub_norm) * theta * (phi(-arg) - phi(arg));

  MeanSe ref = m.law->expect_along(scale * gub, [&phi](double t) { return phi(t); });
  j += m.lambda_r * (ref.mean - phi(arg));

  double eta = s.hkind == HChoice::square ? 1.0 : s.eta;
  double h_moment = m.law->exp_h_moment(eta);  // throws if divergent
  double av = std::exp(s.kappa * ub) * j +
              m.lambda_r * (h_moment - std::exp(h_of(s, y.norm())));
  double se = std::exp(s.kappa * ub) * m.lambda_r * ref.se;
  return {av, se, ref.n};
}

// ---------------------------------------------------------------------------
// measured constants and radial scans

namespace {

std::vector<Vec> direction_grid(int d, int n_dirs, std::uint64_t seed) {
  std::vector<Vec> dirs;
  if (d == 1) {
    Vec u(1);
    u[0] = 1;
    dirs.push_back(u);
    u[0] = -1;
    dirs.push_back(u);
    return dirs;
  }
  if (d == 2) {
    for (int k = 0; k < n_dirs; ++k) {
      double th = 2 * M_PI * k / n_dirs;
      Vec u(2);
      u << std::cos(th), std::sin(th);
      dirs.push_back(u);
    }
    return dirs;
  }
  RngStream rng(seed, 0, role::mc);
  for (int k = 0; k < n_dirs; ++k) {
    Vec g = rng.normal_vec(d);
    double n = g.norm();
    if (n == 0) {
      --k;
      continue;
    }
    dirs.push_back(g / n);
  }
  return dirs;
}

double op_norm(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

}  // namespace

MeasuredConstants measure_constants(const LyapunovSpec& frame, const Model& m, double R,
                                    double radius_hi, double r, int n_dirs, std::uint64_t seed) {
  if (!(R > 0 && radius_hi > R)) throw std::invalid_argument("measure_constants: bad radii");
  const Potential& U = *m.U;
  auto dirs = direction_grid(U.dim(), n_dirs, seed);
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0;
  double c3 = std::numeric_limits<double>::infinity();
  double c4 = 0;
  const int n_rad = 24;
  for (int i = 0; i <= n_rad; ++i) {
    double rad = R * std::pow(radius_hi / R, static_cast<double>(i) / n_rad);
    for (const Vec& u : dirs) {
      Vec x = rad * u;
      Vec gub = grad_u_bar(frame, U, x);
      double gn = gub.norm();
      double ell = ell_of(frame, U, x);
      c1 = std::min(c1, gn * ell);
      c2 = std::max(c2, ell);
      c3 = std::min(c3, gn > 0 ? U.grad(x).norm() * ell / gn
                               : std::numeric_limits<double>::infinity());
      double hb = op_norm(hess_u_bar(frame, U, x));
      c4 = std::max(c4, hb * ell * a_x_sq_bound(frame, m, x));
    }
  }
  double delta = 2.0 * m.law->coordinate_tail_prob(r);
  return {c1, c2, c3, c4, r, delta, R};
}

RadialStats radial_stats(const Potential& U, double radius, int n_dirs, std::uint64_t seed) {
  auto dirs = direction_grid(U.dim(), n_dirs, seed);
  RadialStats st{std::numeric_limits<double>::infinity(), 0,
                 std::numeric_limits<double>::infinity(), 0,
                 std::numeric_limits<double>::infinity(), 0};
  for (const Vec& u : dirs) {
    Vec x = radius * u;
    double v = U.value(x);
    double g = U.grad(x).norm();
    double h = op_norm(U.hessian(x));
    st.u_lo = std::min(st.u_lo, v);
    st.u_hi = std::max(st.u_hi, v);
    st.grad_lo = std::min(st.grad_lo, g);
    st.grad_hi = std::max(st.grad_hi, g);
    st.hess_lo = std::min(st.hess_lo, h);
    st.hess_hi = std::max(st.hess_hi, h);
  }
  return st;
}

bool a4_interval_nonempty(double alpha, double beta) {
  double hi = std::max(alpha, beta), lo = std::min(alpha, beta);
  return hi / 2.0 <= lo;
}

bool a5_interval_nonempty(double alpha, double beta) {
  double hi = std::max(alpha, beta), lo = std::min(alpha, beta);
  return 2.0 * hi / (1.0 + hi) <= lo;
}

// ---------------------------------------------------------------------------
// drift fit

bool check_drift_pair(const std::vector<double>& av, const std::vector<double>& v, double A1,
                      double A2) {
  if (av.size() != v.size()) throw std::invalid_argument("check_drift_pair: size mismatch");
  for (std::size_t i = 0; i < av.size(); ++i)
    if (av[i] > A1 * (A2 - v[i]) + 1e-12 * (1.0 + std::abs(av[i]))) return false;
  return true;
}

DriftFit fit_drift_constants(const std::vector<double>& av, const std::vector<double>& v) {
  if (av.size() != v.size() || av.empty())
    throw std::invalid_argument("fit_drift_constants: need matching nonempty samples");
  const std::size_t n = av.size();
  double v_lo = *std::min_element(v.begin(), v.end());
  double v_hi = *std::max_element(v.begin(), v.end());

  // candidate centers: the sampled V values plus a geometric fill
  std::vector<double> cand(v);
  const int fill = 200;
  for (int k = 0; k <= fill; ++k)
    cand.push_back(v_lo + (v_hi - v_lo) * k / fill);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  DriftFit best;
  for (double A2 : cand) {
    double lo = 0, hi = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      double gap = A2 - v[i];
      if (gap > 0) {
        if (av[i] > 0) lo = std::max(lo, av[i] / gap);
      } else if (gap < 0) {
        if (av[i] >= 0) {
          ok = false;
          break;
        }
        hi = std::min(hi, av[i] / gap);
      } else if (av[i] > 0) {
        ok = false;
        break;
      }
    }
    if (!ok || lo > hi) continue;
    double A1 = std::max(lo, 1e-12);
    if (A1 > hi) continue;
    if (!best.feasible || A1 < best.A1 - 1e-15 ||
        (std::abs(A1 - best.A1) <= 1e-15 && A2 < best.A2)) {
      best.feasible = true;
      best.A1 = A1;
      best.A2 = A2;
    }
  }

  if (!best.feasible) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (av[i] > 0) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] > v[j]; });
    if (idx.size() > 20) idx.resize(20);
    best.offenders = std::move(idx);
  }
  return best;
}

std::vector<std::pair<Vec, Vec>> sample_drift_points(const LyapunovSpec& s, const Model& m,
                                                     const std::vector<double>& radii,
                                                     int per_radius, std::uint64_t seed) {
  RngStream rng(seed, 0, role::init);
  auto dirs_rng = RngStream(seed, 1, role::init);
  std::vector<std::pair<Vec, Vec>> pts;
  int d = m.U->dim();
  for (double rad : radii) {
    for (int k = 0; k < per_radius; ++k) {
      Vec u = dirs_rng.normal_vec(d);
      double n = u.norm();
      if (n == 0) {
        --k;
        continue;
      }
      Vec x = (rad / n) * u;
      Vec y = m.law->sample(rng);
      if (k % 2 == 1) {
        // push the speed to the boundary of the admissible kinetic region;
        // the tiny inset keeps the point inside the closed region under
        // floating-point rounding of the rescale
        double cap = std::sqrt(a_x_sq_bound(s, m, x));
        double yn = y.norm();
        if (yn > 0 && cap > 0) y *= cap * (1.0 - 1e-12) / yn;
      }
      pts.emplace_back(std::move(x), std::move(y));
    }
  }
  return pts;
}

}  // namespace bps
