#include <cmath>
#include <vector>

#include "doctest.h"

#include "bps/mathx.hpp"
#include "bps/rng.hpp"

using namespace bps;

TEST_CASE("normal cdf/sf/pdf basics") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(norm_sf(1.2) == doctest::Approx(1.0 - norm_cdf(1.2)).epsilon(1e-13));
  CHECK(norm_cdf(-3.0) + norm_cdf(3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));
  // deep tail stays accurate (complementary form, no cancellation)
  CHECK(norm_sf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-6));
}

TEST_CASE("Gauss-Legendre integrates polynomials and smooth functions") {
  const auto& gl = gauss_legendre(16);
  double p = gl.integrate(0.0, 1.0, [](double x) { return x * x; });
  CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  double s = gl.integrate(0.0, M_PI, [](double x) { return std::sin(x); });
  CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
  // degree-31 polynomial is exact for 16 nodes
  double q = gl.integrate(-1.0, 1.0, [](double x) { return std::pow(x, 30); });
  CHECK(q == doctest::Approx(2.0 / 31.0).epsilon(1e-12));
}

TEST_CASE("kolmogorov tail matches a direct series evaluation") {
  auto oracle = [](double lam) {
    double s = 0;
    for (int k = 1; k <= 200; ++k)
      s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lam * lam);
    return s;
  };
  for (double lam : {0.5, 0.8, 1.0, 1.36, 2.0}) CHECK(kolmogorov_q(lam) == doctest::Approx(oracle(lam)).epsilon(1e-10));
  CHECK(kolmogorov_q(0.02) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("one-sample KS accepts the truth and rejects a shift") {
  RngStream r(3, 0, role::mc);
  std::vector<double> xs(20000);
  for (auto& v : xs) v = r.uniform();
  CHECK(ks_test(xs, [](double x) { return x; }).p > 0.01);
  CHECK(ks_test(xs, [](double x) { return std::min(1.0, std::max(0.0, x - 0.05)); }).p < 1e-6);
}

TEST_CASE("two-sample KS accepts same law and rejects different laws") {
  RngStream r(5, 0, role::mc);
  std::vector<double> a(8000), b(8000), c(8000);
  for (auto& v : a) v = r.normal();
  for (auto& v : b) v = r.normal();
  for (auto& v : c) v = r.normal() + 0.2;
  CHECK(ks_test2(a, b).p > 0.01);
  CHECK(ks_test2(a, c).p < 1e-6);
}

TEST_CASE("wilson interval brackets the empirical rate") {
  Interval i = wilson_interval(50, 100);
  CHECK(i.lo < 0.5);
  CHECK(i.hi > 0.5);
  CHECK(i.lo == doctest::Approx(1.0 - wilson_interval(50, 100).hi).epsilon(1e-12));
  Interval all = wilson_interval(100, 100);
  CHECK(all.hi == 1.0);
  CHECK(all.lo > 0.95);
  Interval none = wilson_interval(0, 100);
  CHECK(none.lo == 0.0);
  CHECK(none.hi < 0.05);
  // interval shrinks with n
  CHECK(wilson_interval(500, 1000).hi - wilson_interval(500, 1000).lo <
        wilson_interval(50, 100).hi - wilson_interval(50, 100).lo);
}

TEST_CASE("mean_se and batch means") {
  std::vector<double> c(100, 3.25);
  MeanSe m = mean_se(c);
  CHECK(m.mean == doctest::Approx(3.25));
  CHECK(m.se == doctest::Approx(0.0));
  RngStream r(6, 0, role::mc);
  std::vector<double> xs(40000);
  for (auto& v : xs) v = r.normal();
  MeanSe b = batch_mean_se(xs, 50);
  CHECK(std::abs(b.mean) < 5 * b.se + 1e-3);
  CHECK(b.se == doctest::Approx(1.0 / std::sqrt(40000.0)).epsilon(0.5));
}

TEST_CASE("scalar minimizer and root finder") {
  double m = minimize_scalar([](double x) { return (x - 2.0) * (x - 2.0) + 1.0; }, -1.0, 5.0);
  CHECK(m == doctest::Approx(2.0).epsilon(1e-8));
  double r = find_root([](double x) { return std::cos(x); }, 0.0, 2.0);
  CHECK(r == doctest::Approx(M_PI / 2.0).epsilon(1e-10));
  CHECK_THROWS_AS(find_root([](double x) { return 1.0 + x * x; }, 0.0, 1.0), std::invalid_argument);
}
