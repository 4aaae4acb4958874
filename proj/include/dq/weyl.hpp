#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dq/torus.hpp"

namespace dq {

// Cell key of a Weyl-bundle section: symmetric y-multidegree alpha (length
// 2n) and strictly increasing dx index list J (1-based).
using WKey = std::pair<std::vector<int>, std::vector<int>>;

inline int abs_alpha(const std::vector<int> &alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

// Wedge-merge two strictly increasing index lists. Returns false when they
// intersect; otherwise fills the merged list and the inversion sign.
inline bool wedge_merge(const std::vector<int> &a, const std::vector<int> &b, std::vector<int> &out, int &sign) {
  out.clear();
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  long inversions = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] jumps over the remaining entries of a.
      inversions += static_cast<long>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  sign = (inversions % 2 == 0) ? 1 : -1;
  return true;
}

// Graded section of the Weyl bundle tensored with forms of degree deg. The
// Weyl degree of a term is 2*(nu power) + |alpha|; contributions beyond dmax
// are dropped at insertion, which is an exact quotient because every
// operation below respects the degree filtration.
template <class S>
class WeylSection {
 public:
  using Scalar = S;

  WeylSection() : dim_(0), order_(0), dmax_(0), deg_(0) {}
  WeylSection(int dim, int order, int dmax, int deg) : dim_(dim), order_(order), dmax_(dmax), deg_(deg) {
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("torus dimension must be a positive even integer");
    if (order < 0) throw std::invalid_argument("negative truncation order");
    if (dmax < 0) throw std::invalid_argument("negative degree bound");
    // deg > dim is allowed: such a section is vacuously zero, which lets
    // d(d(a)) and similar compositions type-check at the top degree.
    if (deg < 0) throw std::invalid_argument("form degree out of range");
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int dmax() const { return dmax_; }
  int deg() const { return deg_; }
  bool is_zero() const { return cells_.empty(); }
  const std::map<WKey, TorusFun<S>> &cells() const { return cells_; }

  TorusFun<S> cell(const std::vector<int> &alpha, const std::vector<int> &J) const {
    auto it = cells_.find(WKey(alpha, J));
    if (it == cells_.end()) return TorusFun<S>(dim_, order_);
    return it->second;
  }

  void add_cell(const std::vector<int> &alpha, const std::vector<int> &J, const TorusFun<S> &f) {
    check_key(alpha, J);
    int p = abs_alpha(alpha);
    TorusFun<S> kept = f.nu_filtered([&](int k) { return 2 * k + p <= dmax_; });
    if (kept.is_zero()) return;
    auto it = cells_.find(WKey(alpha, J));
    if (it == cells_.end()) {
      cells_.emplace(WKey(alpha, J), std::move(kept));
      return;
    }
    it->second += kept;
    if (it->second.is_zero()) cells_.erase(it);
  }

  void set_cell(const std::vector<int> &alpha, const std::vector<int> &J, const TorusFun<S> &f) {
    cells_.erase(WKey(alpha, J));
    add_cell(alpha, J, f);
  }

  WeylSection &operator+=(const WeylSection &o) {
    check_compat(o);
    for (const auto &[key, f] : o.cells_) add_cell(key.first, key.second, f);
    return *this;
  }
  WeylSection &operator-=(const WeylSection &o) {
    check_compat(o);
    for (const auto &[key, f] : o.cells_) add_cell(key.first, key.second, -f);
    return *this;
  }
  friend WeylSection operator+(WeylSection a, const WeylSection &b) {
    a += b;
    return a;
  }
  friend WeylSection operator-(WeylSection a, const WeylSection &b) {
    a -= b;
    return a;
  }
  WeylSection operator-() const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) r.cells_.emplace(key, -f);
    return r;
  }

  bool operator==(const WeylSection &o) const {
    return dim_ == o.dim_ && order_ == o.order_ && dmax_ == o.dmax_ && deg_ == o.deg_ && cells_ == o.cells_;
  }
  bool operator!=(const WeylSection &o) const { return !(*this == o); }

  WeylSection scaled(const GaussianRational &s) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    if (s.is_zero()) return r;
    for (const auto &[key, f] : cells_) r.cells_.emplace(key, f.scaled(s));
    return r;
  }

  WeylSection scaled_formal(const FormalScalar &s) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) r.add_cell(key.first, key.second, f.scaled_formal(s));
    return r;
  }

  WeylSection nu_shifted(int k) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) r.add_cell(key.first, key.second, f.nu_shifted(k));
    return r;
  }

  template <class F>
  auto map_cells(F fn) const -> WeylSection<typename decltype(fn(std::declval<const TorusFun<S> &>()))::Scalar> {
    using T = typename decltype(fn(std::declval<const TorusFun<S> &>()))::Scalar;
    WeylSection<T> r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) r.add_cell(key.first, key.second, fn(f));
    return r;
  }

  // Slice of the given Weyl degree (terms with 2k + |alpha| == d).
  WeylSection degree_slice(int d) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) {
      int p = abs_alpha(key.first);
      r.add_cell(key.first, key.second, f.nu_filtered([&](int k) { return 2 * k + p == d; }));
    }
    return r;
  }

  WeylSection degree_at_least(int d) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) {
      int p = abs_alpha(key.first);
      r.add_cell(key.first, key.second, f.nu_filtered([&](int k) { return 2 * k + p >= d; }));
    }
    return r;
  }

  // Terms of Weyl degree strictly below d. Each application of delta (alone
  // or inside the flat differential) eats one degree of accuracy at the top
  // of the window, so identity checks compare below the trust boundary.
  WeylSection degree_below(int d) const {
    WeylSection r(dim_, order_, dmax_, deg_);
    for (const auto &[key, f] : cells_) {
      int p = abs_alpha(key.first);
      r.add_cell(key.first, key.second, f.nu_filtered([&](int k) { return 2 * k + p < d; }));
    }
    return r;
  }

  std::string str() const {
    std::string out;
    for (const auto &[key, f] : cells_) {
      if (!out.empty()) out += "  +  ";
      std::string cell = "y^[";
      for (size_t i = 0; i < key.first.size(); ++i) {
        if (i) cell += ",";
        cell += std::to_string(key.first[i]);
      }
      cell += "] dx[";
      for (size_t i = 0; i < key.second.size(); ++i) {
        if (i) cell += ",";
        cell += std::to_string(key.second[i]);
      }
      cell += "]";
      out += "(" + f.str() + ") " + cell;
    }
    return out.empty() ? "0" : out;
  }

 private:
  void check_key(const std::vector<int> &alpha, const std::vector<int> &J) const {
    if (static_cast<int>(alpha.size()) != dim_) throw std::invalid_argument("y-multidegree length does not match dimension");
    for (int a : alpha)
      if (a < 0) throw std::invalid_argument("negative y-multidegree");
    if (static_cast<int>(J.size()) != deg_) throw std::invalid_argument("dx index count does not match form degree");
    for (size_t k = 0; k < J.size(); ++k) {
      if (J[k] < 1 || J[k] > dim_) throw std::invalid_argument("dx index out of range");
      if (k > 0 && J[k] <= J[k - 1]) throw std::invalid_argument("dx indices must be strictly increasing");
    }
  }
  void check_compat(const WeylSection &o) const {
    if (dim_ != o.dim_ || deg_ != o.deg_) throw std::invalid_argument("section shape mismatch");
    if (order_ != o.order_ || dmax_ != o.dmax_) throw std::invalid_argument("section truncation mismatch");
  }

  int dim_;
  int order_;
  int dmax_;
  int deg_;
  std::map<WKey, TorusFun<S>> cells_;
};

namespace detail {

// Enumerate the fiberwise contractions between y^alpha and y^beta. Per block
// a there are p_a pairings along Lambda^{2a-1,2a} = -1 (left derivative on
// y_{2a-1}, right derivative on y_{2a}) and q_a along Lambda^{2a,2a-1} = +1.
// visit(muL, muR, c, scale) receives the derivative multidegrees, the total
// contraction count c, and the rational factor collecting signs, 1/(p!q!)
// and the falling factorials; the nu^c/2^c bookkeeping stays with the
// caller.
template <class Visit>
void for_each_contraction(const std::vector<int> &alpha, const std::vector<int> &beta, Visit visit) {
  int n = static_cast<int>(alpha.size()) / 2;
  std::vector<int> muL(alpha.size(), 0), muR(alpha.size(), 0);
  mpq_class scale(1);

  auto falling = [](int top, int count) {
    long f = 1;
    for (int j = 0; j < count; ++j) f *= (top - j);
    return f;
  };

  std::function<void(int, int)> rec = [&](int block, int c) {
    if (block == n) {
      visit(muL, muR, c, scale);
      return;
    }
    int i1 = 2 * block, i2 = 2 * block + 1;  // 0-based slots of the block
    int pmax = std::min(alpha[i1], beta[i2]);
    int qmax = std::min(alpha[i2], beta[i1]);
    for (int p = 0; p <= pmax; ++p) {
      for (int q = 0; q <= qmax; ++q) {
        mpq_class saved = scale;
        mpq_class fac(1);
        for (int j = 2; j <= p; ++j) fac *= j;
        for (int j = 2; j <= q; ++j) fac *= j;
        mpq_class num(falling(alpha[i1], p));
        num *= falling(alpha[i2], q);
        num *= falling(beta[i2], p);
        num *= falling(beta[i1], q);
        if (p % 2 == 1) num = -num;
        scale *= num / fac;
        muL[i1] = p;
        muL[i2] = q;
        muR[i2] = p;
        muR[i1] = q;
        if (scale != 0) rec(block + 1, c + p + q);
        scale = saved;
        muL[i1] = muL[i2] = muR[i1] = muR[i2] = 0;
      }
    }
  };
  rec(0, 0);
}

inline mpq_class half_pow(int c) {
  mpq_class r(1);
  for (int j = 0; j < c; ++j) r /= 2;
  return r;
}

// Shared kernel of the fiberwise product and its commutators. When odd_only
// is set, only odd contraction orders contribute, each doubled, and the nu
// power is lowered by nu_drop (0 for the plain commutator, 1 for the scaled
// one).
template <class S>
WeylSection<S> circ_kernel(const WeylSection<S> &a, const WeylSection<S> &b, bool odd_only, int nu_drop) {
  if (a.dim() != b.dim() || a.order() != b.order() || a.dmax() != b.dmax()) throw std::invalid_argument("section truncation mismatch");
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg() + b.deg());
  for (const auto &[ka, fa] : a.cells()) {
    for (const auto &[kb, fb] : b.cells()) {
      std::vector<int> J;
      int wsign = 0;
      if (!wedge_merge(ka.second, kb.second, J, wsign)) continue;
      TorusFun<S> prod = fa * fb;
      if (prod.is_zero()) continue;
      for_each_contraction(ka.first, kb.first, [&](const std::vector<int> &muL, const std::vector<int> &muR, int c, const mpq_class &scale) {
        if (odd_only && c % 2 == 0) return;
        mpq_class coef = scale * half_pow(c);
        if (odd_only) coef *= 2;
        if (wsign < 0) coef = -coef;
        if (coef == 0) return;
        std::vector<int> gamma(ka.first.size());
        for (size_t i = 0; i < gamma.size(); ++i) gamma[i] = ka.first[i] - muL[i] + kb.first[i] - muR[i];
        r.add_cell(gamma, J, prod.scaled(GaussianRational(coef)).nu_shifted(c - nu_drop));
      });
    }
  }
  return r;
}

}  // namespace detail

// Fiberwise product: Moyal-type contraction on the y variables, wedge on
// dx, pointwise product of the coefficient functions.
template <class S>
WeylSection<S> circ(const WeylSection<S> &a, const WeylSection<S> &b) {
  return detail::circ_kernel(a, b, false, 0);
}

// Graded commutator [a,b] = a@b - (-1)^{q1 q2} b@a. The reversed product
// reproduces the contraction terms of a@b up to (-1)^c, so the commutator
// is twice the odd-order part and needs no cancellation arithmetic.
template <class S>
WeylSection<S> graded_commutator(const WeylSection<S> &a, const WeylSection<S> &b) {
  return detail::circ_kernel(a, b, true, 0);
}

// (1/nu)[a,b]: odd contraction orders carry nu^c with c >= 1, so the
// division happens termwise via nu^(c-1) and never leaves the ring.
template <class S>
WeylSection<S> scaled_commutator(const WeylSection<S> &a, const WeylSection<S> &b) {
  return detail::circ_kernel(a, b, true, 1);
}

// delta(a) = dx^k ^ d/dy^k a, lowering Weyl degree by one.
template <class S>
WeylSection<S> delta(const WeylSection<S> &a) {
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg() + 1);
  for (const auto &[key, f] : a.cells()) {
    for (int k = 1; k <= a.dim(); ++k) {
      int ak = key.first[static_cast<size_t>(k - 1)];
      if (ak == 0) continue;
      std::vector<int> J;
      int sign = 0;
      if (!wedge_merge({k}, key.second, J, sign)) continue;
      std::vector<int> alpha = key.first;
      alpha[static_cast<size_t>(k - 1)] -= 1;
      GaussianRational c(static_cast<long>(ak));
      if (sign < 0) c = -c;
      r.add_cell(alpha, J, f.scaled(c));
    }
  }
  return r;
}

// Fiberwise homotopy inverse of delta: on a term with y-degree p and form
// degree q > 0 it contracts each dx slot into a y slot with weight 1/(p+q);
// the (0,0) part is annihilated. Raises Weyl degree by one.
template <class S>
WeylSection<S> delta_inv(const WeylSection<S> &a) {
  if (a.deg() == 0) return WeylSection<S>(a.dim(), a.order(), a.dmax(), 0);
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg() - 1);
  for (const auto &[key, f] : a.cells()) {
    int q = static_cast<int>(key.second.size());
    int p = abs_alpha(key.first);
    if (p + q == 0) continue;
    GaussianRational inv(make_rational(1, p + q));
    for (size_t pos = 0; pos < key.second.size(); ++pos) {
      int k = key.second[pos];
      std::vector<int> J;
      J.reserve(key.second.size() - 1);
      for (size_t j = 0; j < key.second.size(); ++j)
        if (j != pos) J.push_back(key.second[j]);
      std::vector<int> alpha = key.first;
      alpha[static_cast<size_t>(k - 1)] += 1;
      GaussianRational c = inv;
      if (pos % 2 == 1) c = -c;
      r.add_cell(alpha, J, f.scaled(c));
    }
  }
  return r;
}

// Exterior derivative of the coefficient functions, wedged in front.
template <class S>
WeylSection<S> weyl_d(const WeylSection<S> &a) {
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg() + 1);
  for (const auto &[key, f] : a.cells()) {
    for (int j = 1; j <= a.dim(); ++j) {
      TorusFun<S> df = f.derivative(j);
      if (df.is_zero()) continue;
      std::vector<int> J;
      int sign = 0;
      if (!wedge_merge({j}, key.second, J, sign)) continue;
      r.add_cell(key.first, J, sign > 0 ? df : -df);
    }
  }
  return r;
}

// Interior product with a constant integer vector field.
template <class S>
WeylSection<S> i_const_field(const WeylSection<S> &a, const std::vector<int> &v) {
  if (static_cast<int>(v.size()) != a.dim()) throw std::invalid_argument("field length does not match dimension");
  if (a.deg() == 0) throw std::invalid_argument("interior product needs positive form degree");
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg() - 1);
  for (const auto &[key, f] : a.cells()) {
    for (size_t pos = 0; pos < key.second.size(); ++pos) {
      int k = key.second[pos];
      long vk = v[static_cast<size_t>(k - 1)];
      if (vk == 0) continue;
      std::vector<int> J;
      for (size_t j = 0; j < key.second.size(); ++j)
        if (j != pos) J.push_back(key.second[j]);
      GaussianRational c(vk);
      if (pos % 2 == 1) c = -c;
      r.add_cell(key.first, J, f.scaled(c));
    }
  }
  return r;
}

// Embeddings of base objects as sections.
template <class S>
WeylSection<S> section_of_fun(const TorusFun<S> &f, int dmax) {
  WeylSection<S> r(f.dim(), f.order(), dmax, 0);
  r.add_cell(zero_mode(f.dim()), {}, f);
  return r;
}

template <class S>
WeylSection<S> section_of_form(const TorusForm<S> &w, int dmax) {
  WeylSection<S> r(w.dim(), w.order(), dmax, w.deg());
  for (const auto &[idx, f] : w.comps()) r.add_cell(zero_mode(w.dim()), idx, f);
  return r;
}

// The y-free part of a section as a plain form of the same degree.
template <class S>
TorusForm<S> base_form_part(const WeylSection<S> &a) {
  TorusForm<S> w(a.dim(), a.order(), a.deg());
  Mode z = zero_mode(a.dim());
  for (const auto &[key, f] : a.cells())
    if (key.first == z) w.add_comp(key.second, f);
  return w;
}

// Symbol map: the y-free, form-free coefficient.
template <class S>
TorusFun<S> sigma_symbol(const WeylSection<S> &a) {
  if (a.deg() != 0) throw std::invalid_argument("symbol of a form-valued section");
  return a.cell(zero_mode(a.dim()), {});
}

template <class S>
TorusFun<S> unit_fun(int dim, int order) {
  TorusFun<S> one(dim, order);
  one.set_coeff(zero_mode(dim), embed_formal<S>(FormalScalar::constant(order, GaussianRational(1))));
  return one;
}

// y^j as a degree-1 section (1-based j).
template <class S>
WeylSection<S> y_coordinate(int dim, int order, int dmax, int j) {
  if (j < 1 || j > dim) throw std::invalid_argument("fiber index out of range");
  std::vector<int> alpha(static_cast<size_t>(dim), 0);
  alpha[static_cast<size_t>(j - 1)] = 1;
  WeylSection<S> r(dim, order, dmax, 0);
  r.add_cell(alpha, {}, unit_fun<S>(dim, order));
  return r;
}

// The contraction generator w_ij y^i dx^j; its scaled adjoint action equals
// -delta, which is pinned by a test.
template <class S>
WeylSection<S> delta_generator(int dim, int order, int dmax) {
  WeylSection<S> r(dim, order, dmax, 1);
  TorusFun<S> one = unit_fun<S>(dim, order);
  for (int i = 1; i <= dim; ++i)
    for (int j = 1; j <= dim; ++j) {
      int w = omega_entry(i, j);
      if (w == 0) continue;
      std::vector<int> alpha(static_cast<size_t>(dim), 0);
      alpha[static_cast<size_t>(i - 1)] = 1;
      r.add_cell(alpha, {j}, one.scaled(GaussianRational(static_cast<long>(w))));
    }
  return r;
}

// Family of substitutions theta -> theta + t v applied to a section:
// coefficient modes pick up the phase of m.v turns, the fiber and form
// parts are untouched. direction -1 gives the inverse loop.
template <class S>
WeylSection<TimeFun> rotate_section(const WeylSection<S> &a, const std::vector<int> &v, int direction) {
  WeylSection<TimeFun> r(a.dim(), a.order(), a.dmax(), a.deg());
  for (const auto &[key, f] : a.cells()) r.add_cell(key.first, key.second, loop_pullback(f, v, direction));
  return r;
}

// Torsion-free symplectic Christoffel data, stored through the lowered
// totally symmetric tensor A_ijk = Gamma^l_ij w_lk; this packing makes both
// symmetry constraints automatic. Gamma^k_ij = A_ijl Lambda^lk.
class ConnectionData {
 public:
  using Fun = TorusFun<FormalScalar>;

  ConnectionData(int dim, int order) : dim_(dim), order_(order) {
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("torus dimension must be a positive even integer");
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }

  static ConnectionData flat(int dim, int order) { return ConnectionData(dim, order); }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool is_flat_data() const { return lowered_.empty(); }

  // Sets A_ijk for every permutation of (i,j,k); indices are 1-based.
  void set_lowered(int i, int j, int k, const Fun &value) {
    check_index(i);
    check_index(j);
    check_index(k);
    if (value.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (value.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
    std::vector<int> idx{i, j, k};
    std::sort(idx.begin(), idx.end());
    if (value.is_zero())
      lowered_.erase(key(idx[0], idx[1], idx[2]));
    else
      lowered_[key(idx[0], idx[1], idx[2])] = value;
  }

  Fun lowered(int i, int j, int k) const {
    check_index(i);
    check_index(j);
    check_index(k);
    std::vector<int> idx{i, j, k};
    std::sort(idx.begin(), idx.end());
    auto it = lowered_.find(key(idx[0], idx[1], idx[2]));
    if (it == lowered_.end()) return Fun(dim_, order_);
    return it->second;
  }

  // Gamma^k_ij = A_ijl Lambda^lk.
  Fun christoffel(int i, int j, int k) const {
    Fun s(dim_, order_);
    for (int l = 1; l <= dim_; ++l) {
      int lam = lambda_entry(l, k);
      if (lam == 0) continue;
      s += lowered(i, j, l).scaled(GaussianRational(static_cast<long>(lam)));
    }
    return s;
  }

  // True when every A_ijk has constant coefficients (zero mode only).
  bool is_translation_invariant() const {
    for (const auto &[k, f] : lowered_) {
      (void)k;
      for (const auto &[m, c] : f.coeffs()) {
        (void)c;
        if (!is_zero_mode(m)) return false;
      }
    }
    return true;
  }

 private:
  void check_index(int i) const {
    if (i < 1 || i > dim_) throw std::invalid_argument("connection index out of range");
  }
  long key(int i, int j, int k) const { return (static_cast<long>(i) * 128 + j) * 128 + k; }

  int dim_;
  int order_;
  std::map<long, Fun> lowered_;
};

// Quadratic connection generator (1/2) w_lk Gamma^k_ij y^l y^j dx^i; the
// covariant derivative of sections is d + (1/nu)[gen, .]. Note the order of
// the lowering: w_lk Gamma^k_ij = -A_ijl.
inline WeylSection<FormalScalar> connection_generator(const ConnectionData &cd, int dmax) {
  int dim = cd.dim();
  WeylSection<FormalScalar> r(dim, cd.order(), dmax, 1);
  for (int i = 1; i <= dim; ++i)
    for (int j = 1; j <= dim; ++j)
      for (int l = 1; l <= dim; ++l) {
        TorusFun<FormalScalar> coeff = -cd.lowered(i, j, l);
        if (coeff.is_zero()) continue;
        std::vector<int> alpha(static_cast<size_t>(dim), 0);
        alpha[static_cast<size_t>(l - 1)] += 1;
        alpha[static_cast<size_t>(j - 1)] += 1;
        r.add_cell(alpha, {i}, coeff.scaled(make_rational(1, 2)));
      }
  return r;
}

// Covariant derivative on sections of any form degree.
template <class S>
WeylSection<S> covariant_d(const WeylSection<S> &a, const WeylSection<S> &gamma_bar) {
  return weyl_d(a) + scaled_commutator(gamma_bar, a);
}

// Curvature generator (1/4) w_ir R^r_jkl y^i y^j dx^k dx^l, with
// R^r_jkl = d_k Gamma^r_lj - d_l Gamma^r_kj + Gamma^r_km Gamma^m_lj
//          - Gamma^r_lm Gamma^m_kj.
// covariant_d(covariant_d(a)) = (1/nu)[R, a] and the equality with
// d(gen) + (1/2)(1/nu)[gen, gen] are pinned by tests.
inline WeylSection<FormalScalar> curvature_generator(const ConnectionData &cd, int dmax) {
  int dim = cd.dim();
  int order = cd.order();
  WeylSection<FormalScalar> out(dim, order, dmax, 2);
  for (int j = 1; j <= dim; ++j)
    for (int k = 1; k <= dim; ++k)
      for (int l = k + 1; l <= dim; ++l)
        for (int r = 1; r <= dim; ++r) {
          TorusFun<FormalScalar> R(dim, order);
          R += cd.christoffel(l, j, r).derivative(k);
          R -= cd.christoffel(k, j, r).derivative(l);
          for (int m = 1; m <= dim; ++m) {
            R += cd.christoffel(k, m, r) * cd.christoffel(l, j, m);
            R -= cd.christoffel(l, m, r) * cd.christoffel(k, j, m);
          }
          if (R.is_zero()) continue;
          for (int i = 1; i <= dim; ++i) {
            int w = omega_entry(i, r);
            if (w == 0) continue;
            std::vector<int> alpha(static_cast<size_t>(dim), 0);
            alpha[static_cast<size_t>(i - 1)] += 1;
            alpha[static_cast<size_t>(j - 1)] += 1;
            // The dx pair (k,l) and its swap both contribute to the sorted
            // representative, so 1/4 becomes 1/2 here.
            out.add_cell(alpha, {k, l}, R.scaled(GaussianRational(static_cast<long>(w))).scaled(make_rational(1, 2)));
          }
        }
  return out;
}

}  // namespace dq
