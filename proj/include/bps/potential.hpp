#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

namespace bps {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Target potential U: R^d -> R, twice continuously differentiable and bounded
// below. Implementations supply enough curvature information for exact
// thinning: a sup bound on the Hessian norm along a line segment, and a
// certified sup bound on ||grad U|| over centered balls.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec grad(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;

  // upper bound on sup_{s in [0,h]} ||hessian(x + s y)||_op
  virtual double hessian_norm_bound(const Vec& x, const Vec& y, double h) const = 0;

  // upper bound on sup_{||z|| <= radius} ||grad U(z)||, tight for the catalog
  virtual double grad_norm_sup(double radius) const = 0;

  virtual std::string name() const = 0;
};

// directional event rate <y, grad U(x)>_+
double bounce_rate(const Potential& U, const Vec& x, const Vec& y);

// B >= sup_{s in [0,h]} <y, grad U(x + s y)>_+ ; the default envelope is
// rate(x,y) + h * ||y||^2 * (segment Hessian bound)
double segment_rate_bound(const Potential& U, const Vec& x, const Vec& y, double h);

// catalog
std::shared_ptr<Potential> make_gaussian(const Mat& precision);
std::shared_ptr<Potential> make_aniso_power(const Vec& alpha);
std::shared_ptr<Potential> make_logistic(const Mat& covariates, const Eigen::VectorXi& labels,
                                         double sigma, double beta);
std::shared_ptr<Potential> make_double_well(double tilt);
std::shared_ptr<Potential> make_zero(int dim);
std::shared_ptr<Potential> make_homogeneous_perturbed(int dim, double alpha, double eps);

// U scaled by a positive constant (used by tempering/annealing reductions)
std::shared_ptr<Potential> make_scaled(std::shared_ptr<Potential> base, double scale);

}  // namespace bps
