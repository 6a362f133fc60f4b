#include "bps/velocity.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace bps {

namespace {

constexpr int kProjectionCache = 1'000'000;
constexpr std::uint64_t kCacheSeed = 0x5ca1ab1edeadbeefULL;

MeanSe mc_expect(const std::vector<double>& cache, double scale,
                 const std::function<double(double)>& f) {
  double s = 0, s2 = 0;
  for (double t : cache) {
    double v = f(scale * t);
    s += v;
    s2 += v * v;
  }
  double n = static_cast<double>(cache.size());
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n), cache.size()};
}

class GaussianVelocity final : public VelocityLaw {
 public:
  explicit GaussianVelocity(const Mat& sigma) : sigma_(sigma) {
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1)
      throw std::invalid_argument("gaussian velocity: covariance must be square");
    if (!sigma_.isApprox(sigma_.transpose(), 1e-12))
      throw std::invalid_argument("gaussian velocity: covariance must be symmetric");
    Eigen::LLT<Mat> llt(sigma_);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("gaussian velocity: covariance must be positive definite");
    chol_ = llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma_);
    eig_ = es.eigenvalues();
  }

  int dim() const override { return static_cast<int>(sigma_.rows()); }

  Vec sample(RngStream& rng) const override { return chol_ * rng.normal_vec(dim()); }

  double coordinate_tail_prob(double r) const override {
    return norm_sf(r / std::sqrt(sigma_(0, 0)));
  }

  MeanSe expect_along(const Vec& v, const std::function<double(double)>& f) const override {
    double scale = std::sqrt(std::max(0.0, v.dot(sigma_ * v)));
    ensure_cache();
    return mc_expect(cache_, scale, f);
  }

  double exp_h_moment(double eta) const override {
    double logdet = 0;
    for (int i = 0; i < eig_.size(); ++i) {
      double m = 1.0 - 2.0 * eta * eig_[i];
      if (m <= 0) throw std::domain_error("gaussian velocity: exp moment diverges");
      logdet += std::log(m);
    }
    return std::exp(-0.5 * logdet);
  }

  double support_radius() const override { return std::numeric_limits<double>::infinity(); }
  const Mat* covariance() const override { return &sigma_; }
  std::string name() const override { return "gaussian_velocity"; }

 private:
  void ensure_cache() const {
    std::call_once(cache_flag_, [this] {
      RngStream rng(kCacheSeed, 0, role::law_cache);
      cache_.resize(kProjectionCache);
      for (auto& t : cache_) t = rng.normal();
    });
  }

  Mat sigma_, chol_;
  Vec eig_;
  mutable std::vector<double> cache_;
  mutable std::once_flag cache_flag_;
};

class SphereVelocity final : public VelocityLaw {
 public:
  SphereVelocity(int d, double r0) : d_(d), r0_(r0) {
    if (d < 1) throw std::invalid_argument("sphere velocity: bad dimension");
    if (r0 <= 0) throw std::invalid_argument("sphere velocity: radius must be positive");
  }

  int dim() const override { return d_; }

  Vec sample(RngStream& rng) const override {
    for (;;) {
      Vec g = rng.normal_vec(d_);
      double n = g.norm();
      if (n > 0) return (r0_ / n) * g;
    }
  }

  double coordinate_tail_prob(double r) const override {
    double s = r / r0_;
    if (d_ == 1) {
      // two-point law at +-r0
      if (s > 1) return 0.0;
      if (s <= -1) return 1.0;
      return 0.5;
    }
    if (s >= 1) return 0.0;
    if (s <= -1) return 1.0;
    double half = 0.5 * boost::math::ibeta(0.5 * (d_ - 1), 0.5, 1.0 - s * s);
    return s >= 0 ? half : 1.0 - half;
  }

  MeanSe expect_along(const Vec& v, const std::function<double(double)>& f) const override {
    double c = v.norm() * r0_;
    if (d_ == 1) return {0.5 * (f(c) + f(-c)), 0.0, 2};
    // polar angle density proportional to sin^{d-2}
    const auto& gl = gauss_legendre(256);
    double z = 0, num = 0;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      double th = 0.5 * M_PI * (gl.x[k] + 1.0);
      double w = gl.w[k] * std::pow(std::sin(th), d_ - 2);
      z += w;
      num += w * f(c * std::cos(th));
    }
    return {num / z, 0.0, gl.x.size()};
  }

  double exp_h_moment(double eta) const override { return std::exp(eta * r0_ * r0_); }
  double support_radius() const override { return r0_; }
  std::string name() const override { return "sphere_velocity"; }

 private:
  int d_;
  double r0_;
};

class BallVelocity final : public VelocityLaw {
 public:
  BallVelocity(int d, double M) : d_(d), M_(M) {
    if (d < 1) throw std::invalid_argument("ball velocity: bad dimension");
    if (M <= 0) throw std::invalid_argument("ball velocity: radius must be positive");
  }

  int dim() const override { return d_; }

  Vec sample(RngStream& rng) const override {
    for (;;) {
      Vec g = rng.normal_vec(d_);
      double n = g.norm();
      if (n == 0) continue;
      double u = rng.uniform_pos();
      return (M_ * std::pow(u, 1.0 / d_) / n) * g;
    }
  }

  double coordinate_tail_prob(double r) const override {
    double s = r / M_;
    if (s >= 1) return 0.0;
    if (s <= -1) return 1.0;
    double half = 0.5 * boost::math::ibeta(0.5 * (d_ + 1), 0.5, 1.0 - s * s);
    return s >= 0 ? half : 1.0 - half;
  }

  MeanSe expect_along(const Vec& v, const std::function<double(double)>& f) const override {
    double scale = v.norm() * M_;
    ensure_cache();
    return mc_expect(cache_, scale, f);
  }

  double exp_h_moment(double eta) const override {
    // radial density d rho^{d-1} on [0,1] after standardization
    const auto& gl = gauss_legendre(256);
    double s = 0;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      double rho = 0.5 * (gl.x[k] + 1.0);
      s += 0.5 * gl.w[k] * d_ * std::pow(rho, d_ - 1) * std::exp(eta * M_ * M_ * rho * rho);
    }
    return s;
  }

  double support_radius() const override { return M_; }
  std::string name() const override { return "ball_velocity"; }

 private:
  void ensure_cache() const {
    std::call_once(cache_flag_, [this] {
      RngStream rng(kCacheSeed, 1, role::law_cache);
      cache_.resize(kProjectionCache);
      BallVelocity unit(d_, 1.0);
      for (auto& t : cache_) t = unit.sample(rng)[0];
    });
  }

  int d_;
  double M_;
  mutable std::vector<double> cache_;
  mutable std::once_flag cache_flag_;
};

}  // namespace

std::shared_ptr<VelocityLaw> make_gaussian_velocity(const Mat& sigma) {
  return std::make_shared<GaussianVelocity>(sigma);
}
std::shared_ptr<VelocityLaw> make_sphere_velocity(int dim, double r0) {
  return std::make_shared<SphereVelocity>(dim, r0);
}
std::shared_ptr<VelocityLaw> make_ball_velocity(int dim, double radius) {
  return std::make_shared<BallVelocity>(dim, radius);
}

}  // namespace bps
