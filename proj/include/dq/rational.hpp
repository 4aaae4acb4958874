#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dq {

// Exact rational helper; mpq_class(num, den) does not canonicalize on its own.
inline mpq_class make_rational(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// Gaussian rational: re + i*im with exact rational parts. The coefficient
// field for every series in the engine; no floating point anywhere.
struct GaussianRational {
  mpq_class re;
  mpq_class im;

  GaussianRational() : re(0), im(0) {}
  GaussianRational(long r) : re(r), im(0) {}
  GaussianRational(mpq_class r) : re(std::move(r)), im(0) {}
  GaussianRational(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i_times(long n) { return GaussianRational(mpq_class(0), mpq_class(n)); }

  bool is_zero() const { return re == 0 && im == 0; }

  GaussianRational operator-() const { return {-re, -im}; }

  GaussianRational &operator+=(const GaussianRational &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational &operator-=(const GaussianRational &o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussianRational &operator*=(const GaussianRational &o) {
    mpq_class r = re * o.re - im * o.im;
    mpq_class i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational &b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational &b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational &b) { return a *= b; }
  friend bool operator==(const GaussianRational &a, const GaussianRational &b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational &a, const GaussianRational &b) { return !(a == b); }

  GaussianRational conj() const { return {re, -im}; }

  // |z|^2 as a rational; nonzero iff z != 0.
  mpq_class norm2() const { return re * re + im * im; }

  GaussianRational inverse() const {
    mpq_class n = norm2();
    if (n == 0) throw std::domain_error("division by zero Gaussian rational");
    return {re / n, -im / n};
  }

  GaussianRational &operator/=(const GaussianRational &o) { return *this *= o.inverse(); }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational &b) { return a /= b; }

  std::string str() const {
    if (im == 0) return re.get_str();
    std::string s = "(" + re.get_str();
    s += (im > 0) ? "+" : "-";
    s += mpq_class(abs(im)).get_str() + "i)";
    return s;
  }
};

}  // namespace dq
