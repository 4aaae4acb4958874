#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dq/ring.hpp"

namespace dq {

// Fourier modes on the 2n-torus are integer vectors of length 2n.
using Mode = std::vector<int>;

inline Mode zero_mode(int dim) { return Mode(static_cast<size_t>(dim), 0); }

inline Mode mode_sum(const Mode &a, const Mode &b) {
  Mode r(a);
  for (size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

inline bool is_zero_mode(const Mode &m) {
  for (int mk : m)
    if (mk != 0) return false;
  return true;
}

inline int mode_dot(const Mode &m, const Mode &v) {
  int s = 0;
  for (size_t k = 0; k < m.size(); ++k) s += m[k] * v[k];
  return s;
}

// Standard symplectic pairing of modes, summed over the (2a-1, 2a) blocks.
// This is the mode-level Poisson structure: {e_m, e_n} = lambda(m, n) e_{m+n}.
inline long mode_lambda(const Mode &m, const Mode &n) {
  long s = 0;
  for (size_t a = 0; a + 1 < m.size(); a += 2)
    s += static_cast<long>(m[a]) * n[a + 1] - static_cast<long>(m[a + 1]) * n[a];
  return s;
}

// Entries of the standard symplectic form and its inverse, 1-based indices.
// omega = sum_a dtheta_{2a-1} ^ dtheta_{2a}, Lambda = omega^{-1}.
inline int omega_entry(int i, int j) {
  if (i % 2 == 1 && j == i + 1) return 1;
  if (i % 2 == 0 && j == i - 1) return -1;
  return 0;
}

inline int lambda_entry(int i, int j) { return -omega_entry(i, j); }

// Trigonometric polynomial over the scalar ring S (formal series or loop-time
// families).  Stored as a sparse mode -> coefficient map; zero coefficients
// are pruned eagerly so equality is structural.
template <class S>
class TorusFun {
 public:
  using Scalar = S;

  TorusFun() : dim_(0), order_(0) {}
  TorusFun(int dim, int order) : dim_(dim), order_(order) {
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("torus dimension must be a positive even integer");
    if (order < 0) throw std::invalid_argument("truncation order must be nonnegative");
  }

  static TorusFun mode(int dim, int order, const Mode &m, const S &c) {
    TorusFun f(dim, order);
    f.set_coeff(m, c);
    return f;
  }

  static TorusFun basis_mode(int dim, int order, const Mode &m) {
    S one = ring_zero_of<S>(order);
    one += to_time_or_self<S>(FormalScalar::constant(order, GaussianRational(1)));
    return mode(dim, order, m, one);
  }

  static TorusFun constant(int dim, int order, const S &c) { return mode(dim, order, zero_mode(dim), c); }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::map<Mode, S> &coeffs() const { return coeffs_; }

  S coeff(const Mode &m) const {
    auto it = coeffs_.find(m);
    if (it == coeffs_.end()) return ring_zero_of<S>(order_);
    return it->second;
  }

  void set_coeff(const Mode &m, const S &c) {
    if (static_cast<int>(m.size()) != dim_) throw std::invalid_argument("mode length does not match torus dimension");
    if (c.is_zero())
      coeffs_.erase(m);
    else
      coeffs_[m] = c;
  }

  void add_coeff(const Mode &m, const S &c) {
    if (static_cast<int>(m.size()) != dim_) throw std::invalid_argument("mode length does not match torus dimension");
    auto it = coeffs_.find(m);
    if (it == coeffs_.end()) {
      if (!c.is_zero()) coeffs_.emplace(m, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }

  TorusFun &operator+=(const TorusFun &o) {
    check_compat(o);
    for (const auto &[m, c] : o.coeffs_) add_coeff(m, c);
    return *this;
  }

  TorusFun &operator-=(const TorusFun &o) {
    check_compat(o);
    for (const auto &[m, c] : o.coeffs_) add_coeff(m, -c);
    return *this;
  }

  friend TorusFun operator+(TorusFun a, const TorusFun &b) {
    a += b;
    return a;
  }
  friend TorusFun operator-(TorusFun a, const TorusFun &b) {
    a -= b;
    return a;
  }
  TorusFun operator-() const {
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) r.coeffs_.emplace(m, -c);
    return r;
  }

  friend TorusFun operator*(const TorusFun &a, const TorusFun &b) {
    a.check_compat(b);
    TorusFun r(a.dim_, a.order_);
    for (const auto &[m, cm] : a.coeffs_)
      for (const auto &[n, cn] : b.coeffs_) r.add_coeff(mode_sum(m, n), cm * cn);
    return r;
  }

  bool operator==(const TorusFun &o) const { return dim_ == o.dim_ && order_ == o.order_ && coeffs_ == o.coeffs_; }
  bool operator!=(const TorusFun &o) const { return !(*this == o); }

  TorusFun scaled(const GaussianRational &s) const {
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      S sc = c.scaled(s);
      if (!sc.is_zero()) r.coeffs_.emplace(m, sc);
    }
    return r;
  }

  TorusFun scaled_formal(const FormalScalar &s) const {
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      S sc = scale_f(c, s);
      if (!sc.is_zero()) r.coeffs_.emplace(m, sc);
    }
    return r;
  }

  TorusFun nu_shifted(int k) const {
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      S sc = c.nu_shifted(k);
      if (!sc.is_zero()) r.coeffs_.emplace(m, sc);
    }
    return r;
  }

  template <class Pred>
  TorusFun nu_filtered(Pred keep) const {
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      S sc = c.filtered(keep);
      if (!sc.is_zero()) r.coeffs_.emplace(m, sc);
    }
    return r;
  }

  template <class F>
  auto map_scalars(F fn) const -> TorusFun<decltype(fn(std::declval<const S &>()))> {
    using T = decltype(fn(std::declval<const S &>()));
    TorusFun<T> r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      T tc = fn(c);
      if (!tc.is_zero()) r.add_coeff(m, tc);
    }
    return r;
  }

  // Angular derivative along theta_j (1-based): e_m picks up a factor i m_j.
  TorusFun derivative(int j) const {
    if (j < 1 || j > dim_) throw std::invalid_argument("derivative index out of range");
    TorusFun r(dim_, order_);
    for (const auto &[m, c] : coeffs_) {
      int mj = m[static_cast<size_t>(j - 1)];
      if (mj == 0) continue;
      r.coeffs_.emplace(m, c.scaled(GaussianRational::i_times(mj)));
    }
    return r;
  }

  // Largest |m_k| over all stored modes, a cheap support measure for tests.
  int mode_radius() const {
    int r = 0;
    for (const auto &[m, c] : coeffs_)
      for (int mk : m) r = std::max(r, std::abs(mk));
    return r;
  }

  std::string str(const std::string &var = "nu") const {
    if (coeffs_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[m, c] : coeffs_) {
      if (!first) out += " + ";
      first = false;
      out += "(" + c.str(var) + ")*e[";
      for (size_t k = 0; k < m.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(m[k]);
      }
      out += "]";
    }
    return out;
  }

 private:
  template <class T>
  static T to_time_or_self(const FormalScalar &a) {
    if constexpr (std::is_same_v<T, FormalScalar>)
      return a;
    else
      return TimeFun::constant(a);
  }

  void check_compat(const TorusFun &o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("torus dimension mismatch");
    if (order_ != o.order_) throw std::invalid_argument("formal series truncation order mismatch");
  }

  int dim_;
  int order_;
  std::map<Mode, S> coeffs_;
};

// Differential form with TorusFun coefficients.  Components are indexed by
// strictly increasing 1-based index lists of length deg.
using IdxList = std::vector<int>;

template <class S>
class TorusForm {
 public:
  using Scalar = S;

  TorusForm() : dim_(0), order_(0), deg_(0) {}
  TorusForm(int dim, int order, int deg) : dim_(dim), order_(order), deg_(deg) {
    // deg > dim is allowed and always zero, so top-degree results of the
    // exterior derivative type-check.
    if (deg < 0) throw std::invalid_argument("form degree out of range");
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int deg() const { return deg_; }
  bool is_zero() const { return comps_.empty(); }
  const std::map<IdxList, TorusFun<S>> &comps() const { return comps_; }

  TorusFun<S> comp(const IdxList &idx) const {
    auto it = comps_.find(idx);
    if (it == comps_.end()) return TorusFun<S>(dim_, order_);
    return it->second;
  }

  void set_comp(const IdxList &idx, const TorusFun<S> &f) {
    check_idx(idx);
    if (f.is_zero())
      comps_.erase(idx);
    else
      comps_[idx] = f;
  }

  void add_comp(const IdxList &idx, const TorusFun<S> &f) {
    check_idx(idx);
    auto it = comps_.find(idx);
    if (it == comps_.end()) {
      if (!f.is_zero()) comps_.emplace(idx, f);
      return;
    }
    it->second += f;
    if (it->second.is_zero()) comps_.erase(it);
  }

  TorusForm &operator+=(const TorusForm &o) {
    check_compat(o);
    for (const auto &[idx, f] : o.comps_) add_comp(idx, f);
    return *this;
  }
  TorusForm &operator-=(const TorusForm &o) {
    check_compat(o);
    for (const auto &[idx, f] : o.comps_) add_comp(idx, -f);
    return *this;
  }
  friend TorusForm operator+(TorusForm a, const TorusForm &b) {
    a += b;
    return a;
  }
  friend TorusForm operator-(TorusForm a, const TorusForm &b) {
    a -= b;
    return a;
  }
  TorusForm operator-() const {
    TorusForm r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) r.comps_.emplace(idx, -f);
    return r;
  }

  bool operator==(const TorusForm &o) const {
    return dim_ == o.dim_ && order_ == o.order_ && deg_ == o.deg_ && comps_ == o.comps_;
  }
  bool operator!=(const TorusForm &o) const { return !(*this == o); }

  TorusForm scaled(const GaussianRational &s) const {
    TorusForm r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) {
      TorusFun<S> sf = f.scaled(s);
      if (!sf.is_zero()) r.comps_.emplace(idx, sf);
    }
    return r;
  }

  TorusForm scaled_formal(const FormalScalar &s) const {
    TorusForm r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) {
      TorusFun<S> sf = f.scaled_formal(s);
      if (!sf.is_zero()) r.comps_.emplace(idx, sf);
    }
    return r;
  }

  TorusForm nu_shifted(int k) const {
    TorusForm r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) {
      TorusFun<S> sf = f.nu_shifted(k);
      if (!sf.is_zero()) r.comps_.emplace(idx, sf);
    }
    return r;
  }

  template <class Pred>
  TorusForm nu_filtered(Pred keep) const {
    TorusForm r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) {
      TorusFun<S> sf = f.nu_filtered(keep);
      if (!sf.is_zero()) r.comps_.emplace(idx, sf);
    }
    return r;
  }

  template <class F>
  auto map_funs(F fn) const -> TorusForm<typename decltype(fn(std::declval<const TorusFun<S> &>()))::Scalar> {
    using T = typename decltype(fn(std::declval<const TorusFun<S> &>()))::Scalar;
    TorusForm<T> r(dim_, order_, deg_);
    for (const auto &[idx, f] : comps_) {
      auto tf = fn(f);
      if (!tf.is_zero()) r.set_comp(idx, tf);
    }
    return r;
  }

 private:
  void check_idx(const IdxList &idx) const {
    if (static_cast<int>(idx.size()) != deg_) throw std::invalid_argument("component index length does not match form degree");
    for (size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 1 || idx[k] > dim_) throw std::invalid_argument("component index out of range");
      if (k > 0 && idx[k] <= idx[k - 1]) throw std::invalid_argument("component indices must be strictly increasing");
    }
  }
  void check_compat(const TorusForm &o) const {
    if (dim_ != o.dim_ || deg_ != o.deg_) throw std::invalid_argument("form shape mismatch");
    if (order_ != o.order_) throw std::invalid_argument("formal series truncation order mismatch");
  }

  int dim_;
  int order_;
  int deg_;
  std::map<IdxList, TorusFun<S>> comps_;
};

// Vector field with contravariant components X^1..X^{2n}.
template <class S>
class TorusField {
 public:
  TorusField() : dim_(0), order_(0) {}
  TorusField(int dim, int order) : dim_(dim), order_(order), comps_(static_cast<size_t>(dim), TorusFun<S>(dim, order)) {}

  int dim() const { return dim_; }
  int order() const { return order_; }
  const TorusFun<S> &comp(int j) const { return comps_.at(static_cast<size_t>(j - 1)); }
  void set_comp(int j, const TorusFun<S> &f) { comps_.at(static_cast<size_t>(j - 1)) = f; }

  bool is_zero() const {
    for (const auto &f : comps_)
      if (!f.is_zero()) return false;
    return true;
  }
  bool operator==(const TorusField &o) const { return dim_ == o.dim_ && order_ == o.order_ && comps_ == o.comps_; }

 private:
  int dim_;
  int order_;
  std::vector<TorusFun<S>> comps_;
};

template <class S>
TorusForm<S> exterior_d(const TorusFun<S> &f) {
  TorusForm<S> r(f.dim(), f.order(), 1);
  for (int j = 1; j <= f.dim(); ++j) r.set_comp({j}, f.derivative(j));
  return r;
}

template <class S>
TorusForm<S> exterior_d(const TorusForm<S> &w) {
  TorusForm<S> r(w.dim(), w.order(), w.deg() + 1);
  for (const auto &[idx, f] : w.comps()) {
    for (int j = 1; j <= w.dim(); ++j) {
      TorusFun<S> df = f.derivative(j);
      if (df.is_zero()) continue;
      // Insert j into idx with the alternating sign; skip repeated indices.
      IdxList ext;
      ext.reserve(idx.size() + 1);
      bool dup = false;
      int sign = 1;
      size_t k = 0;
      for (; k < idx.size() && idx[k] < j; ++k) ext.push_back(idx[k]);
      if (k < idx.size() && idx[k] == j) dup = true;
      if (!dup) {
        if (k % 2 == 1) sign = -1;
        ext.push_back(j);
        for (; k < idx.size(); ++k) ext.push_back(idx[k]);
        r.add_comp(ext, sign > 0 ? df : -df);
      }
    }
  }
  return r;
}

template <class S>
bool is_closed(const TorusForm<S> &w) {
  return exterior_d(w).is_zero();
}

// Hamiltonian vector field of F for the standard symplectic structure:
// blockwise X = (d_{2a} F, -d_{2a-1} F).
template <class S>
TorusField<S> ham_field(const TorusFun<S> &f) {
  TorusField<S> x(f.dim(), f.order());
  for (int a = 1; a <= f.dim() / 2; ++a) {
    x.set_comp(2 * a - 1, f.derivative(2 * a));
    x.set_comp(2 * a, -f.derivative(2 * a - 1));
  }
  return x;
}

template <class S>
TorusFun<S> poisson(const TorusFun<S> &f, const TorusFun<S> &g) {
  TorusFun<S> r(f.dim(), f.order());
  for (int a = 1; a <= f.dim() / 2; ++a) {
    r += f.derivative(2 * a) * g.derivative(2 * a - 1) - f.derivative(2 * a - 1) * g.derivative(2 * a);
  }
  return r;
}

template <class S>
TorusFun<S> field_apply(const TorusField<S> &x, const TorusFun<S> &f) {
  TorusFun<S> r(f.dim(), f.order());
  for (int j = 1; j <= f.dim(); ++j) r += x.comp(j) * f.derivative(j);
  return r;
}

template <class S>
TorusFun<S> contract(const TorusForm<S> &w, const TorusField<S> &x) {
  if (w.deg() != 1) throw std::invalid_argument("contract to a function expects a 1-form");
  TorusFun<S> r(w.dim(), w.order());
  for (const auto &[idx, f] : w.comps()) r += f * x.comp(idx[0]);
  return r;
}

template <class S>
TorusForm<S> contract_two_form(const TorusForm<S> &w, const TorusField<S> &x) {
  if (w.deg() != 2) throw std::invalid_argument("interior product here expects a 2-form");
  TorusForm<S> r(w.dim(), w.order(), 1);
  for (const auto &[idx, f] : w.comps()) {
    // i(X)(dtheta_i ^ dtheta_j) = X^i dtheta_j - X^j dtheta_i.
    r.add_comp({idx[1]}, x.comp(idx[0]) * f);
    r.add_comp({idx[0]}, -(x.comp(idx[1]) * f));
  }
  return r;
}

// Periods of a closed 1-form against the 2n fundamental cycles, i.e. the
// zero-mode part of each component.  Throws if the form is not closed.
template <class S>
std::vector<S> h1_class(const TorusForm<S> &w) {
  if (w.deg() != 1) throw std::invalid_argument("cohomology class expects a 1-form");
  if (!is_closed(w)) throw std::domain_error("form is not closed");
  std::vector<S> per;
  per.reserve(static_cast<size_t>(w.dim()));
  for (int j = 1; j <= w.dim(); ++j) per.push_back(w.comp({j}).coeff(zero_mode(w.dim())));
  return per;
}

// Zero-mean potential of an exact 1-form; throws "not exact" when the class
// is nonzero (and "form is not closed" when it is not even closed).
template <class S>
TorusFun<S> primitive(const TorusForm<S> &w) {
  std::vector<S> per = h1_class(w);
  for (const auto &p : per)
    if (!p.is_zero()) throw std::domain_error("not exact");
  TorusFun<S> f(w.dim(), w.order());
  for (int j = 1; j <= w.dim(); ++j) {
    TorusFun<S> comp_j = w.comp({j});
    for (const auto &[m, c] : comp_j.coeffs()) {
      int mj = m[static_cast<size_t>(j - 1)];
      if (mj == 0) continue;
      size_t first = 0;
      while (m[first] == 0) ++first;
      if (static_cast<int>(first) != j - 1) continue;  // handled by the first nonzero slot
      f.set_coeff(m, c.scaled(GaussianRational::i_times(mj).inverse()));
    }
  }
  if (exterior_d(f) != w) throw std::domain_error("not exact");
  return f;
}

template <class T>
T embed_formal(const FormalScalar &a) {
  if constexpr (std::is_same_v<T, FormalScalar>)
    return a;
  else
    return TimeFun::constant(a);
}

// One-form with constant integer coefficients, v . dtheta.
template <class S>
TorusForm<S> constant_one_form(int dim, int order, const std::vector<long> &v) {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("coefficient vector length does not match torus dimension");
  TorusForm<S> w(dim, order, 1);
  for (int j = 1; j <= dim; ++j) {
    if (v[static_cast<size_t>(j - 1)] == 0) continue;
    S c = embed_formal<S>(FormalScalar::constant(order, GaussianRational(v[static_cast<size_t>(j - 1)])));
    w.set_comp({j}, TorusFun<S>::constant(dim, order, c));
  }
  return w;
}

// Pull a static function back along the rotation loop theta -> theta + t v:
// each mode picks up the unit-frequency phase E_{m.v} (direction -1 gives
// the inverse substitution theta -> theta - t v).
inline TorusFun<TimeFun> loop_pullback(const TorusFun<FormalScalar> &f, const std::vector<int> &v, int direction = 1) {
  if (static_cast<int>(v.size()) != f.dim()) throw std::invalid_argument("winding vector length does not match torus dimension");
  if (direction != 1 && direction != -1) throw std::invalid_argument("loop direction must be +1 or -1");
  Mode vm(v.begin(), v.end());
  TorusFun<TimeFun> r(f.dim(), f.order());
  for (const auto &[m, c] : f.coeffs()) r.set_coeff(m, TimeFun::phase(f.order(), direction * mode_dot(m, vm), c));
  return r;
}

// Same substitution applied to an already time-dependent function.
inline TorusFun<TimeFun> loop_pullback(const TorusFun<TimeFun> &f, const std::vector<int> &v, int direction = 1) {
  if (static_cast<int>(v.size()) != f.dim()) throw std::invalid_argument("winding vector length does not match torus dimension");
  if (direction != 1 && direction != -1) throw std::invalid_argument("loop direction must be +1 or -1");
  Mode vm(v.begin(), v.end());
  TorusFun<TimeFun> r(f.dim(), f.order());
  for (const auto &[m, c] : f.coeffs()) {
    TimeFun phase = TimeFun::phase(f.order(), direction * mode_dot(m, vm), FormalScalar::constant(f.order(), GaussianRational(1)));
    r.set_coeff(m, phase * c);
  }
  return r;
}

}  // namespace dq
