#pragma once

#include <functional>
#include <memory>
#include <string>

#include "bps/mathx.hpp"
#include "bps/potential.hpp"
#include "bps/rng.hpp"

namespace bps {

// refreshment distribution for the velocity component; all stock laws are
// isotropic apart from the correlated Gaussian, so the directional
// functionals below only see the projection scale
class VelocityLaw {
 public:
  virtual ~VelocityLaw() = default;

  virtual int dim() const = 0;
  virtual Vec sample(RngStream& rng) const = 0;

  // P(<u, Y> >= r) for a fixed unit vector u (first coordinate convention)
  virtual double coordinate_tail_prob(double r) const = 0;

  // E[f(<v, Y>)] — exact quadrature where the projection law is closed-form,
  // otherwise a cached Monte Carlo estimate with its standard error
  virtual MeanSe expect_along(const Vec& v, const std::function<double(double)>& f) const = 0;

  // E[exp(eta ||Y||^2)]; throws std::domain_error when the moment diverges
  virtual double exp_h_moment(double eta) const = 0;

  // sup ||Y|| over the support (+infinity for the Gaussian)
  virtual double support_radius() const = 0;

  // non-null only for the Gaussian law (its covariance drives the couplers)
  virtual const Mat* covariance() const { return nullptr; }

  virtual std::string name() const = 0;
};

std::shared_ptr<VelocityLaw> make_gaussian_velocity(const Mat& sigma);
std::shared_ptr<VelocityLaw> make_sphere_velocity(int dim, double r0);
std::shared_ptr<VelocityLaw> make_ball_velocity(int dim, double radius);

}  // namespace bps
