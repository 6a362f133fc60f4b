#include "bps/harris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bps/rng.hpp"

namespace bps {

void validate_chain(const FiniteChain& chain) {
  const auto n = chain.q.rows();
  if (n == 0 || chain.q.cols() != n) throw std::invalid_argument("transition matrix must be square");
  if (chain.v.size() != n) throw std::invalid_argument("weight vector size mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(chain.q.row(i).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("row of transition matrix does not sum to one");
    if (chain.q.row(i).minCoeff() < -1e-15) throw std::invalid_argument("negative transition probability");
    if (chain.v[i] < 1.0) throw std::invalid_argument("weights must be >= 1");
  }
}

Theorem24Result theorem24_constants(double alpha, double gamma, double c1) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(c1 > 0.0)) throw std::invalid_argument("c1 must be positive");
  Theorem24Result out;
  out.alpha_boundary = (alpha == 0.0);
  if (out.alpha_boundary) {
    // no overlap: the norm can only be kept bounded, never contracted; the
    // one-step factor at any zeta is eq86_factor(zeta, c1)
    out.zeta = 0.0;
    out.kappa = 1.0;
    return out;
  }
  out.zeta = alpha / ((1.0 - gamma) * c1);
  out.kappa = std::max(1.0 - alpha / 2.0, (3.0 + gamma) / 4.0);
  return out;
}

double kappa_general(const HarrisConstants& hc, double zeta) {
  if (!(hc.c2 > 2.0 * hc.c1)) throw std::invalid_argument("need C2 > 2 C1");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  const double kappa1 =
      hc.gamma + (1.0 - hc.gamma) * (1.0 + zeta * hc.c1) / (1.0 + zeta * hc.c2 / 2.0);
  const double kappa2 = std::max(1.0 - hc.alpha + zeta * hc.c1 * (1.0 - hc.gamma) / 2.0, hc.gamma);
  return std::max(kappa1, kappa2);
}

double rho_zeta(const Vec& mu, const Vec& nu, const Vec& v, double zeta) {
  if (mu.size() != nu.size() || mu.size() != v.size())
    throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    s += std::abs(mu[i] - nu[i]) * (1.0 + zeta * v[i]);
  return s;
}

namespace {

Vec random_simplex(RngStream& rng, Eigen::Index n) {
  Vec w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.exponential();
  return w / w.sum();
}

}  // namespace

ContractionReport check_contraction(const FiniteChain& chain, const HarrisConstants& hc,
                                    std::size_t trials, std::uint64_t seed, double zeta) {
  validate_chain(chain);
  if (!(hc.c2 > 2.0 * hc.c1)) throw std::invalid_argument("need C2 > 2 C1");

  ContractionReport rep;
  if (zeta <= 0.0) {
    zeta = theorem24_constants(hc.alpha, hc.gamma, hc.c1).zeta;
    if (zeta <= 0.0) throw std::invalid_argument("alpha = 0 admits no contraction rate");
  }
  rep.zeta = zeta;
  const bool calibrated = std::abs(hc.c2 - 4.0 * hc.c1) <= 1e-12 * hc.c1;
  rep.kappa = calibrated ? theorem24_constants(hc.alpha, hc.gamma, hc.c1).kappa
                         : kappa_general(hc, zeta);

  const auto n = chain.q.rows();
  constexpr double slack = 1e-12;

  // hypothesis 1: TV overlap on the small set {V(x) + V(y) <= C2}
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (chain.v[i] + chain.v[j] > hc.c2) continue;
      const double tv = (chain.q.row(i) - chain.q.row(j)).cwiseAbs().sum();
      if (tv > 2.0 * (1.0 - hc.alpha) + slack)
        rep.overlap_failures.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }

  // hypothesis 2: one-step drift QV <= gamma V + C1 (1 - gamma), every state
  const Vec qv = chain.q * chain.v;
  for (Eigen::Index i = 0; i < n; ++i)
    if (qv[i] > hc.gamma * chain.v[i] + hc.c1 * (1.0 - hc.gamma) + slack)
      rep.drift_failures.push_back(static_cast<int>(i));

  rep.hypotheses_ok = rep.overlap_failures.empty() && rep.drift_failures.empty();
  if (!rep.hypotheses_ok) return rep;

  RngStream rng(seed, 0, role::mc);
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vec mu = random_simplex(rng, n);
    const Vec nu = random_simplex(rng, n);
    const double before = rho_zeta(mu, nu, chain.v, zeta);
    if (before <= 0.0) continue;
    const Vec mu1 = chain.q.transpose() * mu;
    const Vec nu1 = chain.q.transpose() * nu;
    worst = std::max(worst, rho_zeta(mu1, nu1, chain.v, zeta) / before);
    ++used;
  }
  // point masses stress the extremal directions the simplex interior misses
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      Vec mu = Vec::Zero(n), nu = Vec::Zero(n);
      mu[i] = 1.0;
      nu[j] = 1.0;
      const double before = rho_zeta(mu, nu, chain.v, zeta);
      const Vec mu1 = chain.q.transpose() * mu;
      const Vec nu1 = chain.q.transpose() * nu;
      worst = std::max(worst, rho_zeta(mu1, nu1, chain.v, zeta) / before);
      ++used;
    }
  rep.worst_ratio = worst;
  rep.n_pairs = used;
  rep.pass = worst <= rep.kappa + 1e-12;
  return rep;
}

std::pair<FiniteChain, HarrisConstants> example_chain() {
  constexpr int n = 5;
  FiniteChain chain;
  chain.v = Vec(n);
  for (int i = 0; i < n; ++i) chain.v[i] = std::pow(2.0, i);

  Vec pi0(n);
  pi0 << 0.4, 0.3, 0.15, 0.1, 0.05;
  Mat k = Mat::Zero(n, n);
  k(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    k(i, i - 1) = 0.8;
    k(i, i) = 0.2;
  }
  chain.q = 0.5 * Vec::Ones(n) * pi0.transpose() + 0.5 * k;

  HarrisConstants hc;
  hc.alpha = 0.5;  // shared refresh component of mass 1/2
  hc.gamma = 0.5;
  hc.c1 = 3.2;  // max_i (QV - gamma V)_i / (1 - gamma), attained at the bottom state
  hc.c2 = 4.0 * hc.c1;
  return {chain, hc};
}

}  // namespace bps
