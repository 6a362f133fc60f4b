#include "bps/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "bps/mathx.hpp"

namespace bps {

double bounce_rate(const Potential& U, const Vec& x, const Vec& y) {
  return std::max(0.0, y.dot(U.grad(x)));
}

double segment_rate_bound(const Potential& U, const Vec& x, const Vec& y, double h) {
  if (h < 0) throw std::invalid_argument("segment_rate_bound: negative window");
  // d/ds <y, grad U(x+sy)> = <y, hess(x+sy) y> <= ||y||^2 ||hess||
  return bounce_rate(U, x, y) + h * y.squaredNorm() * U.hessian_norm_bound(x, y, h);
}

namespace {

void check_dim(const Potential& U, const Vec& x) {
  if (x.size() != U.dim()) throw std::invalid_argument(U.name() + ": dimension mismatch");
}

// ---------------------------------------------------------------------------
// certified sup of ||grad U|| over B(0,R) by direction/radius scan plus a
// Lipschitz pad; only used for low-dimensional variants without closed forms
double scan_grad_sup(const Potential& U, double R, double lip) {
  const int d = U.dim();
  double best = 0;
  double mesh;
  auto probe = [&](const Vec& u, int nr) {
    for (int k = 0; k <= nr; ++k) {
      double r = R * k / nr;
      best = std::max(best, U.grad(r * u).norm());
    }
  };
  if (d == 1) {
    Vec u(1);
    int nr = 20000;
    u[0] = 1; probe(u, nr);
    u[0] = -1; probe(u, nr);
    mesh = 0.5 * R / nr;
  } else if (d == 2) {
    int na = 1024, nr = 256;
    for (int a = 0; a < na; ++a) {
      double th = 2 * M_PI * a / na;
      Vec u(2);
      u << std::cos(th), std::sin(th);
      probe(u, nr);
    }
    mesh = 0.5 * std::sqrt(std::pow(R * 2 * M_PI / na, 2) + std::pow(R / nr, 2));
  } else if (d == 3) {
    int na = 4096, nr = 96;
    const double ga = M_PI * (3.0 - std::sqrt(5.0));  // Fibonacci sphere
    for (int a = 0; a < na; ++a) {
      double z = 1.0 - 2.0 * (a + 0.5) / na;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec u(3);
      u << rho * std::cos(ga * a), rho * std::sin(ga * a), z;
      probe(u, nr);
    }
    mesh = 0.5 * std::sqrt(std::pow(2 * R / std::sqrt(static_cast<double>(na)), 2) +
                           std::pow(R / nr, 2));
  } else {
    throw std::logic_error("scan_grad_sup: dimension too large");
  }
  return best + lip * mesh;
}

// ---------------------------------------------------------------------------
// separable allocation dual: upper bound for max sum_i g_i(s_i) subject to
// s_i >= 0, sum s_i <= S, with each g_i increasing and either convex or
// concave on [0, S]. By weak duality any lambda >= 0 yields the bound
// sum_i max_{0<=s<=S} (g_i(s) - lambda s) + lambda S; the dual is convex in
// lambda, so a golden-section search finds (close to) the best multiplier.
struct AllocTerm {
  std::function<double(double)> g;        // g(s)
  std::function<double(double)> gp;       // g'(s), decreasing if concave
  bool convex;
};

double alloc_dual_bound(const std::vector<AllocTerm>& terms, double S) {
  auto inner = [&](const AllocTerm& t, double lambda) {
    if (t.convex) return std::max(0.0, t.g(S) - lambda * S);
    // concave: stationary point where g'(s) = lambda
    if (lambda >= t.gp(0.0)) return 0.0;
    if (lambda <= t.gp(S)) return t.g(S) - lambda * S;
    double s = find_root([&](double v) { return t.gp(v) - lambda; }, 0.0, S, 1e-13);
    return t.g(s) - lambda * s;
  };
  auto dual = [&](double lambda) {
    double v = lambda * S;
    for (const auto& t : terms) v += inner(t, lambda);
    return v;
  };
  double lam_hi = 0;
  for (const auto& t : terms) lam_hi = std::max(lam_hi, std::max(t.gp(0.0), t.gp(S)));
  double lam = minimize_scalar(dual, 0.0, lam_hi * 1.05 + 1e-12, 1e-12 * (1 + lam_hi));
  return std::min(dual(lam), dual(0.0));
}

// ---------------------------------------------------------------------------

class GaussianPotential final : public Potential {
 public:
  explicit GaussianPotential(const Mat& precision) : P_(precision) {
    if (P_.rows() != P_.cols() || P_.rows() < 1)
      throw std::invalid_argument("gaussian: precision must be square");
    if (!P_.isApprox(P_.transpose(), 1e-12))
      throw std::invalid_argument("gaussian: precision must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(P_);
    if (es.eigenvalues().minCoeff() <= 0)
      throw std::invalid_argument("gaussian: precision must be positive definite");
    lam_max_ = es.eigenvalues().maxCoeff();
  }

  int dim() const override { return static_cast<int>(P_.rows()); }
  double value(const Vec& x) const override { check_dim(*this, x); return 0.5 * x.dot(P_ * x); }
  Vec grad(const Vec& x) const override { check_dim(*this, x); return P_ * x; }
  Mat hessian(const Vec&) const override { return P_; }
  double hessian_norm_bound(const Vec&, const Vec&, double) const override { return lam_max_; }
  double grad_norm_sup(double radius) const override { return radius * lam_max_; }
  std::string name() const override { return "gaussian"; }

 private:
  Mat P_;
  double lam_max_;
};

class AnisoPowerPotential final : public Potential {
 public:
  explicit AnisoPowerPotential(const Vec& alpha) : a_(alpha) {
    if (a_.size() < 1) throw std::invalid_argument("aniso_power: empty exponent vector");
    for (int i = 0; i < a_.size(); ++i)
      if (a_[i] <= 1.0) throw std::invalid_argument("aniso_power: exponents must exceed 1");
  }

  int dim() const override { return static_cast<int>(a_.size()); }

  double value(const Vec& x) const override {
    check_dim(*this, x);
    double s = 0;
    for (int i = 0; i < x.size(); ++i) s += std::pow(1.0 + x[i] * x[i], 0.5 * a_[i]);
    return s;
  }

  Vec grad(const Vec& x) const override {
    check_dim(*this, x);
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i)
      g[i] = a_[i] * x[i] * std::pow(1.0 + x[i] * x[i], 0.5 * a_[i] - 1.0);
    return g;
  }

  Mat hessian(const Vec& x) const override {
    check_dim(*this, x);
    Mat h = Mat::Zero(x.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
      double u2 = x[i] * x[i];
      h(i, i) = a_[i] * std::pow(1.0 + u2, 0.5 * a_[i] - 2.0) * (1.0 + (a_[i] - 1.0) * u2);
    }
    return h;
  }

  double hessian_norm_bound(const Vec& x, const Vec& y, double h) const override {
    // diagonal Hessian; per coordinate sup over the segment interval
    double b = 0;
    for (int i = 0; i < x.size(); ++i) {
      double m = std::max(std::abs(x[i]), std::abs(x[i] + h * y[i]));
      double al = a_[i];
      double env = (al >= 2.0)
                       ? al * (al - 1.0) * std::pow(1.0 + m * m, 0.5 * al - 1.0)
                       : al;  // for 1 < al < 2 the curvature is capped by al
      b = std::max(b, env);
    }
    return b;
  }

  double grad_norm_sup(double radius) const override {
    // maximize sum_i f_i(x_i)^2 over the ball; each term depends on s_i = x_i^2
    // through g_i(s) = al^2 s (1+s)^{al-2}, convex iff al >= 2
    double S = radius * radius;
    std::vector<AllocTerm> terms;
    for (int i = 0; i < a_.size(); ++i) {
      double al = a_[i];
      terms.push_back({[al](double s) { return al * al * s * std::pow(1.0 + s, al - 2.0); },
                       [al](double s) {
                         return al * al * std::pow(1.0 + s, al - 3.0) * (1.0 + (al - 1.0) * s);
                       },
                       al >= 2.0});
    }
    return std::sqrt(alloc_dual_bound(terms, S));
  }

  std::string name() const override { return "aniso_power"; }

 private:
  Vec a_;
};

class LogisticPotential final : public Potential {
 public:
  LogisticPotential(const Mat& C, const Eigen::VectorXi& labels, double sigma, double beta)
      : C_(C), b_(labels), sigma_(sigma), beta_(beta) {
    if (C_.rows() != b_.size()) throw std::invalid_argument("logistic: rows vs labels mismatch");
    if (C_.cols() < 1) throw std::invalid_argument("logistic: empty covariates");
    for (int i = 0; i < b_.size(); ++i)
      if (b_[i] != 0 && b_[i] != 1) throw std::invalid_argument("logistic: labels must be 0/1");
    if (sigma_ <= 0) throw std::invalid_argument("logistic: sigma must be positive");
    if (beta_ <= 2) throw std::invalid_argument("logistic: prior exponent must exceed 2");
    Eigen::SelfAdjointEigenSolver<Mat> es(C_.transpose() * C_);
    gram_norm_ = es.eigenvalues().maxCoeff();
    col_norm_sum_ = 0;
    for (int i = 0; i < C_.rows(); ++i) col_norm_sum_ += C_.row(i).norm();
  }

  int dim() const override { return static_cast<int>(C_.cols()); }

  double value(const Vec& x) const override {
    check_dim(*this, x);
    double v = 0;
    for (int k = 0; k < x.size(); ++k) v += prior(x[k]);
    Vec t = C_ * x;
    for (int i = 0; i < t.size(); ++i) v += -static_cast<double>(b_[i]) * t[i] + log1pexp(t[i]);
    return v;
  }

  Vec grad(const Vec& x) const override {
    check_dim(*this, x);
    Vec g(x.size());
    for (int k = 0; k < x.size(); ++k) g[k] = prior_d1(x[k]);
    Vec t = C_ * x;
    Vec r(t.size());
    for (int i = 0; i < t.size(); ++i) r[i] = sigmoid(t[i]) - static_cast<double>(b_[i]);
    g += C_.transpose() * r;
    return g;
  }

  Mat hessian(const Vec& x) const override {
    check_dim(*this, x);
    Mat h = Mat::Zero(x.size(), x.size());
    for (int k = 0; k < x.size(); ++k) h(k, k) = prior_d2(x[k]);
    Vec t = C_ * x;
    for (int i = 0; i < t.size(); ++i) {
      double s = sigmoid(t[i]);
      h += (s * (1.0 - s)) * (C_.row(i).transpose() * C_.row(i));
    }
    return h;
  }

  double hessian_norm_bound(const Vec& x, const Vec& y, double h) const override {
    double prior_bound = 0;
    for (int k = 0; k < x.size(); ++k) {
      double m = std::max(std::abs(x[k]), std::abs(x[k] + h * y[k]));
      prior_bound = std::max(prior_bound, prior_d2_env(m));
    }
    return prior_bound + 0.25 * gram_norm_;  // logistic curvature is at most 1/4
  }

  double grad_norm_sup(double radius) const override {
    if (dim() <= 3) {
      double lip = ball_hessian_bound(radius);
      return scan_grad_sup(*this, radius, lip);
    }
    // separable dual for the prior part plus worst-case data part
    double S = radius * radius;
    std::vector<AllocTerm> terms;
    for (int k = 0; k < dim(); ++k) {
      double be = beta_, sg2 = sigma_ * sigma_;
      auto g = [be, sg2](double s) {
        return be * be * s / (sg2 * sg2) * std::pow(1.0 + s / sg2, be - 2.0);
      };
      auto gp = [be, sg2](double s) {
        return be * be / (sg2 * sg2) * std::pow(1.0 + s / sg2, be - 3.0) *
               (1.0 + (be - 1.0) * s / sg2);
      };
      terms.push_back({g, gp, be >= 2.0});
    }
    double prior_part = std::sqrt(alloc_dual_bound(terms, S));
    double data_part = std::min(col_norm_sum_, std::sqrt(gram_norm_ * C_.rows()));
    return prior_part + data_part;
  }

  std::string name() const override { return "logistic"; }

 private:
  static double sigmoid(double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }
  static double log1pexp(double t) {
    return t > 30 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  double prior(double u) const {
    return std::pow(1.0 + u * u / (sigma_ * sigma_), 0.5 * beta_);
  }
  double prior_d1(double u) const {
    double q = u * u / (sigma_ * sigma_);
    return beta_ * u / (sigma_ * sigma_) * std::pow(1.0 + q, 0.5 * beta_ - 1.0);
  }
  double prior_d2(double u) const {
    double q = u * u / (sigma_ * sigma_);
    return beta_ / (sigma_ * sigma_) * std::pow(1.0 + q, 0.5 * beta_ - 2.0) *
           (1.0 + (beta_ - 1.0) * q);
  }
  double prior_d2_env(double m) const {
    double q = m * m / (sigma_ * sigma_);
    return beta_ * (beta_ - 1.0) / (sigma_ * sigma_) * std::pow(1.0 + q, 0.5 * beta_ - 1.0);
  }
  double ball_hessian_bound(double R) const {
    return prior_d2_env(R) + 0.25 * gram_norm_;
  }

  Mat C_;
  Eigen::VectorXi b_;
  double sigma_, beta_;
  double gram_norm_, col_norm_sum_;
};

class DoubleWellPotential final : public Potential {
 public:
  explicit DoubleWellPotential(double tilt) : tilt_(tilt) {}

  int dim() const override { return 1; }
  double value(const Vec& x) const override {
    check_dim(*this, x);
    double u = x[0];
    double w = u * u - 1.0;
    return w * w + tilt_ * u;
  }
  Vec grad(const Vec& x) const override {
    check_dim(*this, x);
    Vec g(1);
    g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0) + tilt_;
    return g;
  }
  Mat hessian(const Vec& x) const override {
    check_dim(*this, x);
    Mat h(1, 1);
    h(0, 0) = 12.0 * x[0] * x[0] - 4.0;
    return h;
  }
  double hessian_norm_bound(const Vec& x, const Vec& y, double h) const override {
    double m = std::max(std::abs(x[0]), std::abs(x[0] + h * y[0]));
    return std::max(4.0, 12.0 * m * m - 4.0);
  }
  double grad_norm_sup(double radius) const override {
    double lip = std::max(4.0, 12.0 * radius * radius - 4.0);
    return scan_grad_sup(*this, radius, lip);
  }
  std::string name() const override { return "double_well"; }

 private:
  double tilt_;
};

class ZeroPotential final : public Potential {
 public:
  explicit ZeroPotential(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("zero: dimension must be positive");
  }
  int dim() const override { return d_; }
  double value(const Vec& x) const override { check_dim(*this, x); return 0.0; }
  Vec grad(const Vec& x) const override { check_dim(*this, x); return Vec::Zero(d_); }
  Mat hessian(const Vec&) const override { return Mat::Zero(d_, d_); }
  double hessian_norm_bound(const Vec&, const Vec&, double) const override { return 0.0; }
  double grad_norm_sup(double) const override { return 0.0; }
  std::string name() const override { return "zero"; }

 private:
  int d_;
};

// radially symmetric: U(x) = w(||x||^2), with w(s) = s^{alpha/2} outside the
// unit ball, a quadratic C^2 continuation inside, plus eps * s/(1+s)
class HomogeneousPerturbedPotential final : public Potential {
 public:
  HomogeneousPerturbedPotential(int d, double alpha, double eps)
      : d_(d), al_(alpha), eps_(eps) {
    if (d < 1) throw std::invalid_argument("homogeneous_perturbed: bad dimension");
    if (alpha <= 1) throw std::invalid_argument("homogeneous_perturbed: alpha must exceed 1");
    if (eps < 0) throw std::invalid_argument("homogeneous_perturbed: negative perturbation");
    double a2 = 0.5 * al_;
    c2_ = 0.5 * a2 * (a2 - 1.0);
    c1_ = a2 - 2.0 * c2_;
    c0_ = 1.0 - c1_ - c2_;
  }

  int dim() const override { return d_; }

  double value(const Vec& x) const override {
    check_dim(*this, x);
    double s = x.squaredNorm();
    return w0(s) + eps_ * s / (1.0 + s);
  }

  Vec grad(const Vec& x) const override {
    check_dim(*this, x);
    double s = x.squaredNorm();
    return (2.0 * wp(s)) * x;
  }

  Mat hessian(const Vec& x) const override {
    check_dim(*this, x);
    double s = x.squaredNorm();
    Mat h = (2.0 * wp(s)) * Mat::Identity(d_, d_);
    h += (4.0 * wpp(s)) * (x * x.transpose());
    return h;
  }

  double hessian_norm_bound(const Vec& x, const Vec& y, double h) const override {
    // s along the segment is a quadratic in t; the extremes sit at the
    // endpoints or the interior minimum
    double s0 = x.squaredNorm();
    double s1 = (x + h * y).squaredNorm();
    double s_lo = std::min(s0, s1), s_hi = std::max(s0, s1);
    double yn2 = y.squaredNorm();
    if (yn2 > 0) {
      double t_star = -x.dot(y) / yn2;
      if (t_star > 0 && t_star < h) s_lo = std::min(s_lo, (x + t_star * y).squaredNorm());
    }
    return 2.0 * wp_abs_sup(s_lo, s_hi) + 4.0 * s_hi * wpp_abs_sup(s_lo, s_hi);
  }

  double grad_norm_sup(double radius) const override {
    // gradient is radial: ||grad U(x)|| = 2 sqrt(s) |w'(s)|; dense 1D scan
    double best = 0;
    int n = 20000;
    for (int k = 0; k <= n; ++k) {
      double r = radius * k / n;
      double s = r * r;
      best = std::max(best, 2.0 * r * std::abs(wp(s)));
    }
    Vec e = Vec::Zero(d_);
    e[0] = 1.0;
    double lip = hessian_norm_bound(Vec::Zero(d_), e, radius);
    return best + lip * (0.5 * radius / n);
  }

  std::string name() const override { return "homogeneous_perturbed"; }

 private:
  double w0(double s) const {
    return s <= 1.0 ? c0_ + c1_ * s + c2_ * s * s : std::pow(s, 0.5 * al_);
  }
  double wp(double s) const {
    double base = s <= 1.0 ? c1_ + 2.0 * c2_ * s : 0.5 * al_ * std::pow(s, 0.5 * al_ - 1.0);
    double pert = eps_ / ((1.0 + s) * (1.0 + s));
    return base + pert;
  }
  double wpp(double s) const {
    double base = s <= 1.0 ? 2.0 * c2_
                           : 0.5 * al_ * (0.5 * al_ - 1.0) * std::pow(s, 0.5 * al_ - 2.0);
    double pert = -2.0 * eps_ / std::pow(1.0 + s, 3);
    return base + pert;
  }
  // the unperturbed part is monotone on each piece, so probing the interval
  // ends (and the splice at s = 1) plus a perturbation-sized slack gives a
  // certified envelope: |pert'| <= eps and |pert''| <= 2 eps everywhere
  double wp_abs_sup(double lo, double hi) const {
    double m = std::max(std::abs(wp(lo)), std::abs(wp(hi)));
    if (lo < 1.0 && hi > 1.0) m = std::max(m, std::abs(wp(1.0)));
    return m + 2.0 * eps_;
  }
  double wpp_abs_sup(double lo, double hi) const {
    double m = std::max(std::abs(wpp(lo)), std::abs(wpp(hi)));
    if (lo < 1.0 && hi > 1.0) m = std::max(m, std::abs(wpp(1.0)));
    return m + 4.0 * eps_;
  }

  int d_;
  double al_, eps_;
  double c0_, c1_, c2_;
};

class ScaledPotential final : public Potential {
 public:
  ScaledPotential(std::shared_ptr<Potential> base, double scale) : base_(std::move(base)), s_(scale) {
    if (s_ <= 0) throw std::invalid_argument("scaled: scale must be positive");
  }
  int dim() const override { return base_->dim(); }
  double value(const Vec& x) const override { return s_ * base_->value(x); }
  Vec grad(const Vec& x) const override { return s_ * base_->grad(x); }
  Mat hessian(const Vec& x) const override { return s_ * base_->hessian(x); }
  double hessian_norm_bound(const Vec& x, const Vec& y, double h) const override {
    return s_ * base_->hessian_norm_bound(x, y, h);
  }
  double grad_norm_sup(double radius) const override { return s_ * base_->grad_norm_sup(radius); }
  std::string name() const override { return base_->name() + "_scaled"; }

 private:
  std::shared_ptr<Potential> base_;
  double s_;
};

}  // namespace

std::shared_ptr<Potential> make_gaussian(const Mat& precision) {
  return std::make_shared<GaussianPotential>(precision);
}
std::shared_ptr<Potential> make_aniso_power(const Vec& alpha) {
  return std::make_shared<AnisoPowerPotential>(alpha);
}
std::shared_ptr<Potential> make_logistic(const Mat& covariates, const Eigen::VectorXi& labels,
                                         double sigma, double beta) {
  return std::make_shared<LogisticPotential>(covariates, labels, sigma, beta);
}
std::shared_ptr<Potential> make_double_well(double tilt) {
  return std::make_shared<DoubleWellPotential>(tilt);
}
std::shared_ptr<Potential> make_zero(int dim) { return std::make_shared<ZeroPotential>(dim); }
std::shared_ptr<Potential> make_homogeneous_perturbed(int dim, double alpha, double eps) {
  return std::make_shared<HomogeneousPerturbedPotential>(dim, alpha, eps);
}
std::shared_ptr<Potential> make_scaled(std::shared_ptr<Potential> base, double scale) {
  return std::make_shared<ScaledPotential>(std::move(base), scale);
}

}  // namespace bps
