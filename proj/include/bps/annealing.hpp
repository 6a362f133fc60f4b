#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bps/core.hpp"

namespace bps {

// time-inhomogeneous sampler: the bounce intensity is multiplied by an
// increasing inverse-temperature schedule beta(t), so the dynamics target the
// tempered family exp(-beta(t) U) and concentrate near the minima of U as
// the temperature drops

enum class ScheduleForm { log_growth, step_table };

struct CoolingSchedule {
  ScheduleForm form = ScheduleForm::log_growth;
  double beta0 = 1.0;  // floor, >= 1
  double d2 = 1.0;     // logarithmic slope
  std::vector<std::pair<double, double>> table;  // right-continuous steps (t, beta)
  double d1 = 0.0, s0 = 1.0;  // certified increment constants (metadata)

  // beta(t) = beta0 v d2 ln(e + t); increments over lag s0 are <= d2 s0 / t
  static CoolingSchedule log_growth_form(double beta0, double d2, double s0 = 1.0);
  static CoolingSchedule from_table(std::vector<std::pair<double, double>> steps);
  static CoolingSchedule constant(double beta);
};

double beta_at(const CoolingSchedule& sched, double t);

struct A10Report {
  bool pass = false;
  double d1 = 0, d2 = 0, s0 = 0;  // certified triple when pass
  std::vector<std::string> violations;
};

// grid certification of the schedule hypotheses: nondecreasing, beta(0) >= 1,
// divergence proxy over the horizon, beta(t) >= d2 ln t for large t, and the
// lag-s0 increment bound beta(t + s0) - beta(t) <= d1 / t
A10Report validate_A10(const CoolingSchedule& sched, double horizon);

struct AnnealConfig {
  Model model;  // bounded-velocity law required (ball or sphere support)
  CoolingSchedule schedule;
  double horizon = 100.0;
  Vec x0;                  // empty = origin
  double eta = 0.4;        // success level: U(X_T) <= min U + eta
  double eta_prime = 0.2;  // secondary (reporting) level, 0 < eta' < eta
  double window0 = 0.5;
};

// same competing clocks as the homogeneous simulator; the bounce thinning
// envelope is beta(segment end) * segment_rate_bound, valid because the
// schedule never decreases
Trajectory simulate_annealed(const AnnealConfig& cfg, std::uint64_t seed,
                             std::uint64_t replica = 0);

struct SuccessReport {
  double fraction = 0;  // frequency of U(X_T) <= min U + eta
  Interval ci;          // Wilson interval at z = 1.96
  std::size_t runs = 0;
  double min_u = 0;
  std::vector<double> u_final;  // terminal potential value per replica
};

SuccessReport success_prob(const AnnealConfig& cfg, std::size_t runs, std::uint64_t seed = 33);

// bracketed golden-section minimum value of a 1d potential
double min_potential_1d(const Potential& U, double lo, double hi);
// catalog dispatch (analytic where known, bracketed search for the 1d wells)
double min_potential(const Potential& U);

// ---- temperature-uniform drift for V2(x,y) = exp(U/2) phi2(<y, grad U>) ----

// increasing C^1 plateau: 1 below -1, 3 above +1, cubic blend between
double phi2(double s);
double phi2_prime(double s);

double v2_value(const Potential& U, const Vec& x, const Vec& y);

// action of the beta-scaled generator on V2; transport and bounce terms are
// analytic, the refreshment integral uses the law's directional expectation
MeanSe a_beta_v2(const Model& m, double beta, const Vec& x, const Vec& y);

struct V2Report {
  double a3 = 0;            // constant fitted at the reference temperature
  double worst_excess = 0;  // max over other betas of (A_beta V2 - a3 V2)/V2
  bool pass = false;
  std::size_t n_points = 0;
};

// samples bounded-velocity states, fits a3 = sup A_{beta_ref} V2 / V2 at
// betas.front(), then checks the same constant dominates every other listed
// temperature: the beta-scaled bounce term is non-positive, so the drift
// bound should hold uniformly in beta
V2Report check_v2_bound(const Model& m, const std::vector<double>& betas, std::size_t n_points,
                        double radius, std::uint64_t seed = 21);

}  // namespace bps
