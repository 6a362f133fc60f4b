#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "bps/core.hpp"
#include "bps/exactq.hpp"

namespace bps {

// ---------------------------------------------------------------------------
// explicit drift parameters: a, b, c, kappa, eps from the closed-form
// recipe, plus the compatibility inequality on the measured constants

struct DriftParams {
  double a, b, c, kappa, eps;
  bool condition13;
};

struct DriftParamsExact {
  QNum a, b, c, kappa, eps;
  bool condition13;
};

DriftParamsExact derive_params_exact(const Rat& c1, const Rat& c2, const Rat& c3, const Rat& c4,
                                     const Rat& r, const Rat& delta, const Rat& lambda_r);
DriftParams derive_params(double c1, double c2, double c3, double c4, double r, double delta,
                          double lambda_r);

// ---------------------------------------------------------------------------
// the shaping function phi: non-decreasing C^1, exact affine core, constant
// tails, quadratic-blend transitions kept inside the +-eps bands

class PhiFunction {
 public:
  PhiFunction(double a, double b, double c, double eps);

  double operator()(double s) const;
  double prime(double s) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double eps() const { return eps_; }

  // width of the interval right of 0 on which the [0,1] derivative cap is
  // waived: C^1 matching with the affine core forces phi'(0) = b-a there,
  // which exceeds c-b+eps whenever the caps are infeasible
  double corner_window() const { return w1_; }
  bool slope_caps_feasible() const { return b_ - a_ <= c_ - b_ + eps_; }
  bool kink_at_origin() const { return kink_; }

 private:
  struct Seg {
    double lo, hi;    // interval
    double v0;        // phi(lo)
    double m0, m1;    // phi'(lo), phi'(hi); linear in between
  };
  void push(double hi, double m1);
  bool scan_ok() const;

  double a_, b_, c_, eps_;
  double w1_ = 0;
  bool kink_ = false;
  std::vector<Seg> segs_;
};

// ---------------------------------------------------------------------------
// Lyapunov specification: the transformed potential, the velocity-weight
// function, the kinetic-energy exponent, the measured constants, and the
// derived drift parameters

enum class PsiChoice { identity, power };          // Ubar = U or U^varsigma
enum class HChoice { square, scaled_square };      // H(t) = t^2 or eta t^2
enum class EllChoice { one, inv_grad_bar, constant };

struct LyapunovSpec {
  PsiChoice psi = PsiChoice::identity;
  double varsigma = 1.0;
  HChoice hkind = HChoice::square;
  double eta = 1.0;
  EllChoice ellkind = EllChoice::one;
  double ell_value = 1.0;

  double c1 = 1, c2 = 1, c3 = 1, c4 = 1;
  double r = 1, delta = 1, R = 0;

  double a = 0, b = 0, c = 0, kappa = 0, eps = 0;
  bool condition13 = false;
  std::shared_ptr<PhiFunction> phi;
};

// runs derive_params on the constants already stored in the spec and builds
// phi; returns the same spec with a,b,c,kappa,eps,condition13,phi filled in
LyapunovSpec finalize_spec(LyapunovSpec spec, double lambda_r);

// transformed potential and its derivatives
double u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x);
Vec grad_u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x);
Mat hess_u_bar(const LyapunovSpec& s, const Potential& U, const Vec& x);
double ell_of(const LyapunovSpec& s, const Potential& U, const Vec& x);
Vec grad_ell(const LyapunovSpec& s, const Potential& U, const Vec& x);
double h_of(const LyapunovSpec& s, double t);

// kinetic-energy region A_x = { y : H(||y||) <= 3 Ubar(x) }
bool in_A_x(const LyapunovSpec& s, const Potential& U, const Vec& x, const Vec& y);
// sup_{y in A_x} ||y||^2 given the velocity law's support
double a_x_sq_bound(const LyapunovSpec& s, const Model& m, const Vec& x);

// V(x,y) = exp(kappa Ubar) phi(2 ell <y, grad Ubar> / (r c1)) + exp(H(||y||));
// with_h_part=false gives the bounded-velocity variant without the second term
double eval_V(const LyapunovSpec& s, const Model& m, const Vec& x, const Vec& y,
              bool with_h_part = true);

// generator applied to V in closed form; the standard error covers the
// refreshment integral of phi (exact for the sphere law, cached MC otherwise)
MeanSe drift_residual(const LyapunovSpec& s, const Model& m, const Vec& x, const Vec& y);

// ---------------------------------------------------------------------------
// measured constants: inf/sup of the defining expressions over radial scans
// on [R, radius_hi]; r is prescribed, delta = 2 P(Y_1 >= r)

struct MeasuredConstants {
  double c1, c2, c3, c4;
  double r, delta, R;
};
MeasuredConstants measure_constants(const LyapunovSpec& frame, const Model& m, double R,
                                    double radius_hi, double r, int n_dirs = 128,
                                    std::uint64_t seed = 11);

// ---------------------------------------------------------------------------
// empirical drift fit: smallest A1 with a matching A2 <= max sampled V such
// that AV_i <= A1 (A2 - V_i) everywhere; requiring the center A2 inside the
// sampled range makes a sign failure at the extremes (AV >= 0 at the largest
// V) show up as infeasibility instead of being absorbed by a huge A2

struct DriftFit {
  bool feasible = false;
  double A1 = 0, A2 = 0;
  std::vector<std::size_t> offenders;  // indices with AV > 0, largest V first
};
DriftFit fit_drift_constants(const std::vector<double>& av, const std::vector<double>& v);
bool check_drift_pair(const std::vector<double>& av, const std::vector<double>& v, double A1,
                      double A2);

// sample states for the drift sweep: annulus radii x velocity draws, odd
// indices rescaled to the A_x boundary
std::vector<std::pair<Vec, Vec>> sample_drift_points(const LyapunovSpec& s, const Model& m,
                                                     const std::vector<double>& radii,
                                                     int per_radius, std::uint64_t seed);

// ---------------------------------------------------------------------------
// radial scans backing the tail-growth probes

struct RadialStats {
  double u_lo, u_hi;
  double grad_lo, grad_hi;
  double hess_lo, hess_hi;
};
RadialStats radial_stats(const Potential& U, double radius, int n_dirs = 256,
                         std::uint64_t seed = 13);

// interval criteria for the separable two-exponent potential on R^2
bool a4_interval_nonempty(double alpha, double beta);
bool a5_interval_nonempty(double alpha, double beta);

}  // namespace bps
