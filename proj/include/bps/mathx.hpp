#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace bps {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }
inline double norm_sf(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }
inline double norm_pdf(double x) { return 0.3989422804014326779 * std::exp(-0.5 * x * x); }

// Gauss-Legendre nodes/weights on [-1,1]. Newton iteration on the Legendre
// recurrence; cached per order.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
  // integral of f over [a,b]
  double integrate(double a, double b, const std::function<double(double)>& f) const {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
    return s * half;
  }
};

inline const GaussLegendre& gauss_legendre(int n) {
  static std::vector<std::unique_ptr<GaussLegendre>> cache(257);
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: order out of range");
  if (!cache[n]) cache[n] = std::make_unique<GaussLegendre>(n);
  return *cache[n];
}

// Kolmogorov asymptotic survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Dual (Jacobi-transformed) series; the direct alternating series needs
    // O(1/lambda^2) terms in this regime.
    const double y = M_PI * M_PI / (8.0 * lambda * lambda);
    double s = 0;
    for (int k = 1; k <= 19; k += 2) {
      double term = std::exp(-static_cast<double>(k) * k * y);
      s += term;
      if (term < 1e-17 * (s + 1e-300)) break;
    }
    double cdf = std::sqrt(2.0 * M_PI) / lambda * s;
    return std::max(0.0, std::min(1.0, 1.0 - cdf));
  }
  double s = 0, sign = 1;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::max(0.0, std::min(1.0, 2.0 * s));
}

struct KsResult {
  double d;   // sup distance
  double p;   // asymptotic p-value
};

// one-sample KS against a cdf; samples need not be sorted
inline KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  double sq = std::sqrt(n);
  double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, kolmogorov_q(lambda)};
}

// two-sample KS
inline KsResult ks_test2(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  double sq = std::sqrt(ne);
  double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, kolmogorov_q(lambda)};
}

struct Interval {
  double lo, hi;
};

// Wilson score interval for a binomial proportion
inline Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96) {
  if (n == 0) return {0.0, 1.0};
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Degenerate observations pin the corresponding endpoint exactly.
  double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = successes == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

struct MeanSe {
  double mean, se;
  std::size_t n;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0, 0, 0};
  double m = 0;
  for (double v : xs) m += v;
  m /= xs.size();
  double s2 = 0;
  for (double v : xs) s2 += (v - m) * (v - m);
  if (xs.size() > 1) s2 /= (xs.size() - 1);
  return {m, std::sqrt(s2 / xs.size()), xs.size()};
}

// standard error of a time-average estimate from a single long trajectory:
// split into batches, use the spread of batch means
inline MeanSe batch_mean_se(const std::vector<double>& xs, int n_batches = 50) {
  if (xs.size() < static_cast<std::size_t>(2 * n_batches)) return mean_se(xs);
  std::size_t bs = xs.size() / n_batches;
  std::vector<double> bm(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double s = 0;
    for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += xs[i];
    bm[b] = s / bs;
  }
  MeanSe r = mean_se(bm);
  return {r.mean, r.se, xs.size()};
}

// golden-section minimizer for a unimodal scalar function on [lo, hi]
inline double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-10) {
  const double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Brent-style root bracketing: f(a), f(b) of opposite sign
inline double find_root(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw std::invalid_argument("find_root: endpoints do not bracket");
  // bisection with a secant refinement; robust and tolerance-driven
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    // secant candidate
    double s = (fb != fa) ? b - fb * (b - a) / (fb - fa) : m;
    if (!(s > std::min(a, b) && s < std::max(a, b))) s = m;
    double fs = f(s);
    if (fs == 0 || std::abs(b - a) < tol * (1.0 + std::abs(s))) return s;
    if (fa * fs < 0) { b = s; fb = fs; } else { a = s; fa = fs; }
  }
  return 0.5 * (a + b);
}

}  // namespace bps
