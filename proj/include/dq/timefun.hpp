#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "dq/formal.hpp"

namespace dq {

// Trigonometric-polynomial time dependence on the loop parameter t in [0,1]:
// finite sums over integer frequencies k of p_k(t) * E_k(t), where E_k
// formalizes exp(2*pi*i*k*t) and p_k is a polynomial with FormalScalar
// coefficients. The ring carries the loop-normalized derivative
//   d(E_k) = i*k*E_k,   d(t^j) = j*t^(j-1),
// whose antiderivative keeps every coefficient Gaussian rational; full-period
// integrals send E_k (k != 0) to zero and t^j to 1/(j+1).
class TimeFun {
 public:
  using Poly = std::vector<FormalScalar>;  // ascending powers of t, never empty

  TimeFun() : order_(0) {}
  explicit TimeFun(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }

  static TimeFun constant(FormalScalar v) {
    TimeFun f(v.order());
    if (!v.is_zero()) f.terms_[0] = Poly{std::move(v)};
    return f;
  }
  static TimeFun phase(int order, long k, FormalScalar amp) {
    TimeFun f(order);
    f.check_amp(amp);
    if (!amp.is_zero()) f.terms_[k] = Poly{std::move(amp)};
    return f;
  }
  // t^j with unit coefficient
  static TimeFun t_power(int order, int j) {
    TimeFun f(order);
    Poly p(static_cast<size_t>(j) + 1, FormalScalar(order));
    p.back() = FormalScalar::constant(order, GaussianRational(1));
    f.terms_[0] = std::move(p);
    return f;
  }

  int order() const { return order_; }
  const std::map<long, Poly> &terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }

  bool operator==(const TimeFun &o) const {
    check_order(o);
    TimeFun d = *this - o;
    return d.is_zero();
  }
  bool operator!=(const TimeFun &o) const { return !(*this == o); }

  TimeFun operator-() const {
    TimeFun r(*this);
    for (auto &[k, p] : r.terms_)
      for (auto &c : p) c = -c;
    return r;
  }

  TimeFun &operator+=(const TimeFun &o) {
    check_order(o);
    for (const auto &[k, p] : o.terms_) {
      Poly &dst = poly_at(k);
      if (dst.size() < p.size()) dst.resize(p.size(), FormalScalar(order_));
      for (size_t j = 0; j < p.size(); ++j) dst[j] += p[j];
    }
    trim();
    return *this;
  }
  TimeFun &operator-=(const TimeFun &o) { return *this += -o; }

  friend TimeFun operator+(TimeFun a, const TimeFun &b) { return a += b; }
  friend TimeFun operator-(TimeFun a, const TimeFun &b) { return a -= b; }

  friend TimeFun operator*(const TimeFun &a, const TimeFun &b) {
    a.check_order(b);
    TimeFun r(a.order_);
    for (const auto &[ka, pa] : a.terms_)
      for (const auto &[kb, pb] : b.terms_) {
        Poly &dst = r.poly_at(ka + kb);
        if (dst.size() < pa.size() + pb.size() - 1) dst.resize(pa.size() + pb.size() - 1, FormalScalar(a.order_));
        for (size_t i = 0; i < pa.size(); ++i) {
          if (pa[i].is_zero()) continue;
          for (size_t j = 0; j < pb.size(); ++j) dst[i + j] += pa[i] * pb[j];
        }
      }
    r.trim();
    return r;
  }
  TimeFun &operator*=(const TimeFun &o) { return *this = *this * o; }

  TimeFun scaled(const GaussianRational &z) const {
    TimeFun r(*this);
    for (auto &[k, p] : r.terms_)
      for (auto &c : p) c = c.scaled(z);
    r.trim();
    return r;
  }
  TimeFun scaled(const FormalScalar &s) const {
    TimeFun r(*this);
    for (auto &[k, p] : r.terms_)
      for (auto &c : p) c = c * s;
    r.trim();
    return r;
  }
  TimeFun nu_shifted(int j) const {
    TimeFun r(*this);
    for (auto &[k, p] : r.terms_)
      for (auto &c : p) c = c.nu_shifted(j);
    r.trim();
    return r;
  }
  template <class Pred>
  TimeFun filtered(Pred pred) const {
    TimeFun r(*this);
    for (auto &[k, p] : r.terms_)
      for (auto &c : p) c = c.filtered(pred);
    r.trim();
    return r;
  }

  // Loop-normalized derivative: d(p * E_k) = (p' + i*k*p) * E_k.
  TimeFun derivative() const {
    TimeFun r(order_);
    for (const auto &[k, p] : terms_) {
      Poly q(p.size(), FormalScalar(order_));
      for (size_t j = 0; j < p.size(); ++j) {
        q[j] += p[j].scaled(GaussianRational::i_times(k));
        if (j + 1 < p.size()) q[j] += p[j + 1].scaled(GaussianRational(static_cast<long>(j + 1)));
      }
      Poly &dst = r.poly_at(k);
      dst = std::move(q);
    }
    r.trim();
    return r;
  }

  // Running integral from 0 to t (right inverse of derivative, vanishing at 0).
  TimeFun integral_from_zero() const {
    TimeFun anti = antiderivative();
    FormalScalar at0 = anti.eval_unit(false);
    return anti - TimeFun::constant(at0);
  }

  // Full-period integral over [0,1].
  FormalScalar integral_01() const {
    TimeFun anti = antiderivative();
    return anti.eval_unit(true) - anti.eval_unit(false);
  }

  // Value at t=0 or t=1 (the only evaluation points where E_k is rational).
  FormalScalar eval_unit(bool at_one) const {
    FormalScalar v(order_);
    for (const auto &[k, p] : terms_) {
      (void)k;  // E_k(0) = E_k(1) = 1
      if (at_one) {
        for (const auto &c : p) v += c;
      } else {
        v += p[0];
      }
    }
    return v;
  }

 private:
  // Solve d(q * E_k) = p * E_k for polynomial q. For k=0 this is the ordinary
  // antiderivative; for k != 0, q' + i*k*q = p solved top-down.
  TimeFun antiderivative() const {
    TimeFun r(order_);
    for (const auto &[k, p] : terms_) {
      if (k == 0) {
        Poly q(p.size() + 1, FormalScalar(order_));
        for (size_t j = 0; j < p.size(); ++j)
          q[j + 1] = p[j].scaled(GaussianRational(make_rational(1, static_cast<long>(j + 1))));
        r.poly_at(0) = std::move(q);
      } else {
        GaussianRational ik_inv = GaussianRational::i_times(k).inverse();
        Poly q(p.size(), FormalScalar(order_));
        for (size_t jj = p.size(); jj-- > 0;) {
          FormalScalar rhs = p[jj];
          if (jj + 1 < p.size()) rhs -= q[jj + 1].scaled(GaussianRational(static_cast<long>(jj + 1)));
          q[jj] = rhs.scaled(ik_inv);
        }
        r.poly_at(k) = std::move(q);
      }
    }
    r.trim();
    return r;
  }

  void check_order(const TimeFun &o) const {
    if (order_ != o.order_) throw std::invalid_argument("time ring truncation order mismatch");
  }
  void check_amp(const FormalScalar &a) const {
    if (a.order() != order_) throw std::invalid_argument("time ring truncation order mismatch");
  }

  Poly &poly_at(long k) {
    auto it = terms_.find(k);
    if (it == terms_.end()) it = terms_.emplace(k, Poly{FormalScalar(order_)}).first;
    return it->second;
  }

  void trim() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      Poly &p = it->second;
      while (p.size() > 1 && p.back().is_zero()) p.pop_back();
      if (p.size() == 1 && p[0].is_zero())
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  int order_;
  std::map<long, Poly> terms_;
};

}  // namespace dq
