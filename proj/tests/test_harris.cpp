#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bps/harris.hpp"
#include "bps/rng.hpp"

using namespace bps;

TEST_CASE("chain validation rejects malformed inputs") {
  FiniteChain ok;
  ok.q = Mat::Identity(3, 3);
  ok.v = Vec::Ones(3);
  CHECK_NOTHROW(validate_chain(ok));

  FiniteChain rows = ok;
  rows.q(0, 0) = 0.9;  // row no longer sums to one
  CHECK_THROWS_AS(validate_chain(rows), std::invalid_argument);

  FiniteChain neg = ok;
  neg.q(0, 0) = -0.5;
  neg.q(0, 1) = 1.5;
  CHECK_THROWS_AS(validate_chain(neg), std::invalid_argument);

  FiniteChain small_v = ok;
  small_v.v[1] = 0.5;
  CHECK_THROWS_AS(validate_chain(small_v), std::invalid_argument);
}

TEST_CASE("calibrated contraction constants") {
  auto r = theorem24_constants(0.5, 0.5, 1.0);
  CHECK(!r.alpha_boundary);
  CHECK(r.zeta == doctest::Approx(1.0).epsilon(1e-15));
  // max(1 - alpha/2, (3+gamma)/4) with the second branch binding
  CHECK(r.kappa == doctest::Approx(0.875).epsilon(1e-15));

  auto strong = theorem24_constants(0.9, 0.1, 2.0);
  CHECK(strong.zeta == doctest::Approx(0.9 / (0.9 * 2.0)).epsilon(1e-15));
  CHECK(strong.kappa == doctest::Approx(std::max(1 - 0.45, (3.1) / 4)).epsilon(1e-15));

  auto flat = theorem24_constants(0.0, 0.5, 1.0);
  CHECK(flat.alpha_boundary);
  CHECK(flat.kappa == 1.0);
  CHECK(eq86_factor(flat.zeta, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eq86_factor(0.25, 2.0) == doctest::Approx(1.5).epsilon(1e-15));

  CHECK_THROWS_AS(theorem24_constants(1.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(theorem24_constants(0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(theorem24_constants(0.5, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("general small-set contraction factor") {
  HarrisConstants hc{0.5, 0.5, 1.0, 4.0};
  // kappa1 = gamma + (1-gamma)(1+zeta C1)/(1+zeta C2/2) = 1/2 + (1/2)(2/3)
  CHECK(kappa_general(hc, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  HarrisConstants tightset{0.5, 0.5, 1.0, 2.0};  // needs C2 > 2 C1
  CHECK_THROWS_AS(kappa_general(tightset, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kappa_general(hc, 0.0), std::invalid_argument);

  // the calibrated choice is consistent with the general formula
  auto r = theorem24_constants(0.5, 0.5, 1.0);
  HarrisConstants cal{0.5, 0.5, 1.0, 4.0};
  CHECK(kappa_general(cal, r.zeta) <= r.kappa + 1e-12);
}

TEST_CASE("weighted distance: exact extremal form") {
  Vec v(2), mu(2), nu(2);
  v << 1, 3;
  mu << 1, 0;
  nu << 0, 1;
  CHECK(rho_zeta(mu, nu, v, 1.0) == doctest::Approx(6.0).epsilon(1e-15));
  // zeta = 0 reduces to total variation (L1)
  CHECK(rho_zeta(mu, nu, v, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

  RngStream rng(91, 0, role::mc);
  const int ns = 6;
  for (int rep = 0; rep < 200; ++rep) {
    Vec a(ns), b(ns), w(ns), phi(ns);
    double sa = 0, sb = 0;
    for (int i = 0; i < ns; ++i) {
      a[i] = rng.exponential();
      b[i] = rng.exponential();
      w[i] = 1.0 + 4.0 * rng.uniform();
      sa += a[i];
      sb += b[i];
    }
    a /= sa;
    b /= sb;
    double zeta = 0.3 + rng.uniform();
    double rho = rho_zeta(a, b, w, zeta);
    // every admissible test function gives a lower pairing...
    double pair_rand = 0, pair_ext = 0;
    for (int i = 0; i < ns; ++i) {
      double cap = 1.0 + zeta * w[i];
      phi[i] = cap * (2.0 * rng.uniform() - 1.0);
      pair_rand += phi[i] * (a[i] - b[i]);
      pair_ext += (a[i] >= b[i] ? cap : -cap) * (a[i] - b[i]);
    }
    CHECK(pair_rand <= rho + 1e-12);
    // ...and the sign-extremal one attains the supremum
    CHECK(pair_ext == doctest::Approx(rho).epsilon(1e-12));
  }

  Vec bad(3);
  CHECK_THROWS_AS(rho_zeta(mu, nu, bad, 1.0), std::invalid_argument);
}

TEST_CASE("worked mixture chain contracts at the advertised rate") {
  auto [chain, hc] = example_chain();
  CHECK_NOTHROW(validate_chain(chain));
  ContractionReport rep = check_contraction(chain, hc, 1000);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.overlap_failures.empty());
  CHECK(rep.drift_failures.empty());
  CHECK(rep.pass);
  CHECK(rep.kappa == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(rep.worst_ratio <= rep.kappa + 1e-12);
  CHECK(rep.n_pairs >= 1000);

  // deterministic under a fixed seed
  ContractionReport rep2 = check_contraction(chain, hc, 1000);
  CHECK(rep.worst_ratio == rep2.worst_ratio);
}

TEST_CASE("hypothesis failures are attributed to states and pairs") {
  auto [chain, hc] = example_chain();

  // drift claimed with an impossible margin: the report names the states
  HarrisConstants greedy = hc;
  greedy.gamma = 0.01;
  greedy.c1 = 0.05;
  greedy.c2 = 4 * greedy.c1;
  ContractionReport rep = check_contraction(chain, greedy, 50);
  CHECK(!rep.hypotheses_ok);
  CHECK(!rep.pass);
  CHECK(!rep.drift_failures.empty());
  for (int s : rep.drift_failures) {
    REQUIRE(s >= 0);
    REQUIRE(s < chain.v.size());
    double lhs = chain.q.row(s).dot(chain.v);
    CHECK(lhs > greedy.gamma * chain.v[s] + greedy.c1 * (1 - greedy.gamma));
  }

  // overlap claimed beyond the shared component: small-set pairs reported
  HarrisConstants bold = hc;
  bold.alpha = 0.95;
  ContractionReport rep_o = check_contraction(chain, bold, 50);
  CHECK(!rep_o.hypotheses_ok);
  CHECK(!rep_o.overlap_failures.empty());
  for (auto [i, j] : rep_o.overlap_failures) {
    double tv = (chain.q.row(i) - chain.q.row(j)).cwiseAbs().sum();
    CHECK(tv > 2 * (1 - bold.alpha) + 1e-12);
    CHECK(chain.v[i] + chain.v[j] <= bold.c2 + 1e-12);
  }
}
