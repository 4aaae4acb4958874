#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "dq/rational.hpp"

namespace dq {

// Truncated formal series in the deformation parameter nu with Gaussian
// rational coefficients. The truncation order K is fixed per object; mixing
// orders is a configuration error, not a silent re-truncation.
class FormalScalar {
 public:
  FormalScalar() : c_(1) {}
  explicit FormalScalar(int order) : c_(static_cast<size_t>(order) + 1) {
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }

  static FormalScalar constant(int order, GaussianRational v) {
    FormalScalar s(order);
    s.c_[0] = std::move(v);
    return s;
  }
  // c * nu^k
  static FormalScalar monomial(int order, int k, GaussianRational c) {
    FormalScalar s(order);
    if (k < 0) throw std::invalid_argument("negative nu power");
    if (k <= order) s.c_[static_cast<size_t>(k)] = std::move(c);
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }

  const GaussianRational &coeff(int k) const {
    if (k < 0 || k > order()) throw std::out_of_range("nu power out of range");
    return c_[static_cast<size_t>(k)];
  }
  void set_coeff(int k, GaussianRational v) {
    if (k < 0 || k > order()) throw std::out_of_range("nu power out of range");
    c_[static_cast<size_t>(k)] = std::move(v);
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const GaussianRational &x) { return x.is_zero(); });
  }

  // Smallest k with nonzero nu^k coefficient; order()+1 when zero.
  int valuation() const {
    for (int k = 0; k <= order(); ++k)
      if (!c_[static_cast<size_t>(k)].is_zero()) return k;
    return order() + 1;
  }

  FormalScalar operator-() const {
    FormalScalar r(*this);
    for (auto &x : r.c_) x = -x;
    return r;
  }

  FormalScalar &operator+=(const FormalScalar &o) {
    check_order(o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  FormalScalar &operator-=(const FormalScalar &o) {
    check_order(o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }

  friend FormalScalar operator+(FormalScalar a, const FormalScalar &b) { return a += b; }
  friend FormalScalar operator-(FormalScalar a, const FormalScalar &b) { return a -= b; }

  // Cauchy product truncated at the common order.
  friend FormalScalar operator*(const FormalScalar &a, const FormalScalar &b) {
    a.check_order(b);
    FormalScalar r(a.order());
    for (int i = 0; i <= a.order(); ++i) {
      if (a.c_[static_cast<size_t>(i)].is_zero()) continue;
      for (int j = 0; i + j <= a.order(); ++j)
        r.c_[static_cast<size_t>(i + j)] += a.c_[static_cast<size_t>(i)] * b.c_[static_cast<size_t>(j)];
    }
    return r;
  }

  FormalScalar &operator*=(const FormalScalar &o) { return *this = *this * o; }

  friend bool operator==(const FormalScalar &a, const FormalScalar &b) {
    a.check_order(b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const FormalScalar &a, const FormalScalar &b) { return !(a == b); }

  FormalScalar scaled(const GaussianRational &z) const {
    FormalScalar r(*this);
    for (auto &x : r.c_) x *= z;
    return r;
  }

  // Multiply by nu^k; coefficients pushed past the truncation order drop.
  FormalScalar nu_shifted(int k) const {
    if (k < 0) throw std::invalid_argument("negative nu shift");
    FormalScalar r(order());
    for (int j = 0; j + k <= order(); ++j) r.c_[static_cast<size_t>(j + k)] = c_[static_cast<size_t>(j)];
    return r;
  }

  // Keep only nu^k coefficients with pred(k) true.
  template <class Pred>
  FormalScalar filtered(Pred pred) const {
    FormalScalar r(order());
    for (int k = 0; k <= order(); ++k)
      if (pred(k)) r.c_[static_cast<size_t>(k)] = c_[static_cast<size_t>(k)];
    return r;
  }

  // Re-truncate to a lower order (for stability comparisons).
  FormalScalar truncated(int new_order) const {
    if (new_order > order()) throw std::invalid_argument("cannot extend truncation order");
    FormalScalar r(new_order);
    for (int k = 0; k <= new_order; ++k) r.c_[static_cast<size_t>(k)] = c_[static_cast<size_t>(k)];
    return r;
  }

  std::string str(const std::string &var = "nu") const {
    std::string s;
    for (int k = 0; k <= order(); ++k) {
      const auto &x = c_[static_cast<size_t>(k)];
      if (x.is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += x.str();
      if (k >= 1) s += "*" + var + (k > 1 ? "^" + std::to_string(k) : "");
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check_order(const FormalScalar &o) const {
    if (c_.size() != o.c_.size()) throw std::invalid_argument("formal series truncation order mismatch");
  }

  std::vector<GaussianRational> c_;  // c_[k] multiplies nu^k
};

// exp of a series with zero constant term (nilpotent under truncation).
inline FormalScalar series_exp(const FormalScalar &a) {
  if (!a.coeff(0).is_zero()) throw std::domain_error("series_exp requires zero constant term");
  FormalScalar r = FormalScalar::constant(a.order(), GaussianRational(1));
  FormalScalar term = FormalScalar::constant(a.order(), GaussianRational(1));
  for (int j = 1; j <= a.order(); ++j) {
    term = term * a;
    term = term.scaled(GaussianRational(make_rational(1, j)));
    r += term;
  }
  return r;
}

// Multiplicative inverse of a series with invertible constant term.
inline FormalScalar series_inverse(const FormalScalar &a) {
  if (a.coeff(0).is_zero()) throw std::domain_error("series_inverse requires nonzero constant term");
  GaussianRational c0inv = a.coeff(0).inverse();
  FormalScalar u = a.scaled(c0inv);  // 1 + nilpotent
  FormalScalar n = FormalScalar::constant(a.order(), GaussianRational(1)) - u;
  FormalScalar r = FormalScalar::constant(a.order(), GaussianRational(1));
  FormalScalar pw = FormalScalar::constant(a.order(), GaussianRational(1));
  for (int j = 1; j <= a.order(); ++j) {
    pw = pw * n;
    r += pw;
  }
  return r.scaled(c0inv);
}

}  // namespace dq
