#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bps/mathx.hpp"
#include "bps/potential.hpp"  // Vec/Mat aliases

namespace bps {

// quantitative contraction toolkit for Markov operators in the weighted norm
// rho_zeta(mu, nu) = sup { mu(phi) - nu(phi) : |phi| <= 1 + zeta V }

struct FiniteChain {
  Mat q;  // row-stochastic transition matrix
  Vec v;  // per-state weight, >= 1
};

// throws std::invalid_argument when rows fail to sum to one (1e-12) or V < 1
void validate_chain(const FiniteChain& chain);

struct HarrisConstants {
  double alpha;  // TV overlap on the small set: ||Q(x,.) - Q(y,.)||_TV <= 2(1-alpha)
  double gamma;  // drift factor: QV <= gamma V + C1 (1-gamma)
  double c1;
  double c2;  // small set {V(x)+V(y) <= C2}, C2 > 2 C1
};

struct Theorem24Result {
  double zeta;
  double kappa;
  bool alpha_boundary;  // alpha == 0: no contraction, only the fixed expansion factor
};

// explicit constants for the calibrated small set C2 = 4 C1:
// zeta = alpha / ((1-gamma) C1), kappa = (1 - alpha/2) v ((3+gamma)/4)
Theorem24Result theorem24_constants(double alpha, double gamma, double c1);

// one-step expansion factor available without any overlap (alpha = 0)
inline double eq86_factor(double zeta, double c1) { return 1.0 + zeta * c1; }

// the two contraction branches for a general small set, evaluated at a given
// zeta: kappa1 covers V(x)+V(y) >= C2 via the drift, kappa2 the small set via
// the overlap; the operator contracts at their maximum
double kappa_general(const HarrisConstants& hc, double zeta);

// exact weighted distance between probability vectors: the supremum is
// attained by the pointwise extremal test function sign(mu-nu) (1 + zeta V)
double rho_zeta(const Vec& mu, const Vec& nu, const Vec& v, double zeta);

struct ContractionReport {
  bool hypotheses_ok = false;
  std::vector<std::pair<int, int>> overlap_failures;  // small-set pairs missing the TV bound
  std::vector<int> drift_failures;                    // states violating the drift inequality
  double zeta = 0;
  double kappa = 1;
  double worst_ratio = 0;
  std::size_t n_pairs = 0;
  bool pass = false;
};

// verifies the hypotheses rowwise, then maximizes rho(mu Q, nu Q)/rho(mu, nu)
// over random probability pairs; zeta < 0 selects the calibrated value
ContractionReport check_contraction(const FiniteChain& chain, const HarrisConstants& hc,
                                    std::size_t trials, std::uint64_t seed = 5,
                                    double zeta = -1.0);

// five-state mixture chain with a common refresh component and a geometric
// drift toward the bottom state; satisfies the hypotheses with
// alpha = gamma = 1/2, C1 = 3.2, C2 = 4 C1
std::pair<FiniteChain, HarrisConstants> example_chain();

}  // namespace bps
