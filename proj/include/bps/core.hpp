#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "bps/mathx.hpp"
#include "bps/potential.hpp"
#include "bps/rng.hpp"
#include "bps/velocity.hpp"

namespace bps {

// piecewise-deterministic kinetic sampler: the position moves along straight
// lines, the velocity jumps at event times (specular reflection off the
// potential gradient, or a full refreshment draw)

struct Model {
  std::shared_ptr<Potential> U;
  std::shared_ptr<VelocityLaw> law;
  double lambda_r = 1.0;  // refreshment intensity
};

enum class EventKind { start, bounce, refresh, finish };

struct Event {
  double t;
  Vec x, y;  // state right after the event
  EventKind kind;
};

struct Trajectory {
  std::vector<Event> events;
  std::size_t n_bounce = 0, n_refresh = 0, n_proposals = 0;
  double t_end() const { return events.empty() ? 0.0 : events.back().t; }
};

struct SimConfig {
  double t_max = 1000.0;
  double window0 = 0.5;         // initial thinning window
  std::uint64_t seed = 1;
  std::uint32_t chain = 0;
};

inline constexpr double kNoEvent = std::numeric_limits<double>::infinity();

// free flight
inline Vec flow_x(const Vec& x, const Vec& y, double t) { return x + t * y; }

// specular reflection in the gradient direction; a vanishing gradient leaves
// the velocity untouched
Vec reflect(const Vec& grad, const Vec& y);

// first event of the inhomogeneous rate t -> <y, grad U(x + t y)>_+ by
// thinning with per-window envelopes; returns kNoEvent if none before t_cap
double next_bounce(const Potential& U, const Vec& x, const Vec& y, RngStream& rng,
                   double window0, double t_cap, std::size_t* proposals = nullptr);

// exact inversion of the integrated rate: smallest T with
// int_0^T <y, grad U(x+sy)>_+ ds = budget, or kNoEvent if the integral stays
// below the budget up to t_cap. Uses a certified sign decomposition of the
// directional derivative, so no quadrature error enters. When `consumed` is
// given it receives the budget actually spent, i.e. the integrated rate up to
// min(T, t_cap); callers carrying a residual budget across legs need it.
double next_bounce_inverse(const Potential& U, const Vec& x, const Vec& y, double budget,
                           double t_cap, double* consumed = nullptr);

// integrated bounce rate up to t (same certified decomposition)
double integrated_rate(const Potential& U, const Vec& x, const Vec& y, double t);

// event-chain simulation, bounce and refreshment clocks raced independently
Trajectory simulate(const Model& m, const Vec& x0, const Vec& y0, const SimConfig& cfg);

// single-clock variant: one dominating intensity covers bounce + refreshment,
// the event type is decided at acceptance time
Trajectory simulate_global(const Model& m, const Vec& x0, const Vec& y0, const SimConfig& cfg);

// state at an arbitrary time (piecewise-linear interpolation of the skeleton)
std::pair<Vec, Vec> state_at(const Trajectory& tr, double t);

// time average of f(x_t, y_t) over [burn_in, t_end], Gauss-Legendre inside
// each linear segment, batch means for the standard error
MeanSe time_average(const Trajectory& tr, const std::function<double(const Vec&, const Vec&)>& f,
                    double burn_in = 0.0, int n_batches = 50);

struct GeneratorOptions {
  double fd_step = 1e-5;        // central-difference step for the transport term
  int n_refresh_mc = 100000;    // Monte Carlo size for the refreshment integral
  std::uint64_t seed = 12345;
};

// pointwise action of the extended generator on an observable f(x, y);
// the standard error covers the refreshment Monte Carlo only
MeanSe apply_generator(const Model& m, const std::function<double(const Vec&, const Vec&)>& f,
                       const Vec& x, const Vec& y, const GeneratorOptions& opt = {});

}  // namespace bps
