#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bps {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// element of the quadratic field Q(sqrt(rad)): value = p + q * sqrt(rad).
// A single radicand suffices for the parameter formulas (only one square
// root appears); mixed-radicand arithmetic is rejected. Exact square
// radicands collapse to the rational part on construction.
class QNum {
 public:
  QNum() : p_(0), q_(0), rad_(0) {}
  QNum(const Rat& v) : p_(v), q_(0), rad_(0) {}          // NOLINT: implicit by design
  QNum(long num, long den) : p_(Rat(num, den)), q_(0), rad_(0) {}

  static QNum sqrt_of(const Rat& v) {
    if (v < 0) throw std::domain_error("QNum: negative radicand");
    if (v == 0) return QNum(Rat(0));
    Rat root;
    if (exact_sqrt(v, root)) return QNum(root);
    QNum r;
    r.p_ = 0;
    r.q_ = 1;
    r.rad_ = v;
    return r;
  }

  const Rat& p() const { return p_; }
  const Rat& q() const { return q_; }
  const Rat& rad() const { return rad_; }
  bool is_rational() const { return q_ == 0; }

  friend QNum operator+(const QNum& x, const QNum& y) {
    Rat rad = join(x, y);
    QNum r;
    r.p_ = x.p_ + y.p_;
    r.q_ = x.q_ + y.q_;
    r.rad_ = r.q_ == 0 ? Rat(0) : rad;
    return r;
  }
  friend QNum operator-(const QNum& x, const QNum& y) {
    Rat rad = join(x, y);
    QNum r;
    r.p_ = x.p_ - y.p_;
    r.q_ = x.q_ - y.q_;
    r.rad_ = r.q_ == 0 ? Rat(0) : rad;
    return r;
  }
  friend QNum operator*(const QNum& x, const QNum& y) {
    Rat rad = join(x, y);
    QNum r;
    r.p_ = x.p_ * y.p_ + x.q_ * y.q_ * rad;
    r.q_ = x.p_ * y.q_ + x.q_ * y.p_;
    r.rad_ = r.q_ == 0 ? Rat(0) : rad;
    return r;
  }
  friend QNum operator/(const QNum& x, const QNum& y) { return x * y.inverse(); }

  QNum inverse() const {
    if (p_ == 0 && q_ == 0) throw std::domain_error("QNum: division by zero");
    // 1 / (p + q sqrt(rad)) = (p - q sqrt(rad)) / (p^2 - q^2 rad)
    Rat den = p_ * p_ - q_ * q_ * rad_;
    if (den == 0) throw std::logic_error("QNum: degenerate conjugate (square radicand?)");
    QNum r;
    r.p_ = p_ / den;
    r.q_ = -q_ / den;
    r.rad_ = r.q_ == 0 ? Rat(0) : rad_;
    return r;
  }

  // sign of p + q sqrt(rad)
  int sign() const {
    if (q_ == 0) return cmp_rat(p_, Rat(0));
    if (p_ == 0) return cmp_rat(q_, Rat(0));
    bool pp = p_ > 0, qp = q_ > 0;
    if (pp && qp) return 1;
    if (!pp && !qp) return -1;
    // opposite signs: compare p^2 against q^2 rad
    int mag = cmp_rat(p_ * p_, q_ * q_ * rad_);
    if (pp) return mag >= 0 ? (mag == 0 ? 0 : 1) : -1;
    return mag >= 0 ? (mag == 0 ? 0 : -1) : 1;
  }

  friend bool operator<(const QNum& x, const QNum& y) { return (x - y).sign() < 0; }
  friend bool operator<=(const QNum& x, const QNum& y) { return (x - y).sign() <= 0; }
  friend bool operator==(const QNum& x, const QNum& y) { return (x - y).sign() == 0; }

  friend QNum min(const QNum& x, const QNum& y) { return x <= y ? x : y; }
  friend QNum max(const QNum& x, const QNum& y) { return x <= y ? y : x; }

  double to_double() const {
    double v = p_.convert_to<double>();
    if (q_ != 0) v += q_.convert_to<double>() * std::sqrt(rad_.convert_to<double>());
    return v;
  }

  std::string str() const {
    std::string s = p_.str();
    if (q_ != 0) s += " + (" + q_.str() + ")*sqrt(" + rad_.str() + ")";
    return s;
  }

 private:
  static int cmp_rat(const Rat& x, const Rat& y) { return x < y ? -1 : (x == y ? 0 : 1); }

  static Rat join(const QNum& x, const QNum& y) {
    if (x.q_ == 0) return y.rad_;
    if (y.q_ == 0) return x.rad_;
    if (x.rad_ != y.rad_) throw std::logic_error("QNum: mixed radicands");
    return x.rad_;
  }

  static bool exact_sqrt(const Rat& v, Rat& out) {
    BigInt num = boost::multiprecision::numerator(v);
    BigInt den = boost::multiprecision::denominator(v);
    BigInt sn = boost::multiprecision::sqrt(num);
    BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn == num && sd * sd == den) {
      out = Rat(sn, sd);
      return true;
    }
    return false;
  }

  Rat p_, q_, rad_;
};

// exact rational from a double (every finite double is rational)
inline Rat rat_from_double(double v) { return Rat(v); }

}  // namespace bps
