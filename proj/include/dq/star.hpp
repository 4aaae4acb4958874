#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "dq/torus.hpp"

namespace dq {

using Fun = TorusFun<FormalScalar>;
using Form = TorusForm<FormalScalar>;
using Field = TorusField<FormalScalar>;

// A formal star product on the torus, truncated at a fixed nu order. Concrete
// products are nu-linear and reduce to the pointwise product at nu^0.
class StarProduct {
 public:
  virtual ~StarProduct() = default;

  virtual int dim() const = 0;
  virtual int order() const = 0;
  virtual std::string name() const = 0;
  virtual Fun eval(const Fun &f, const Fun &g) const = 0;

  Fun commutator(const Fun &f, const Fun &g) const { return eval(f, g) - eval(g, f); }

  Fun unit() const { return Fun::constant(dim(), order(), FormalScalar::constant(order(), GaussianRational(1))); }

 protected:
  void check_args(const Fun &f, const Fun &g) const {
    if (f.dim() != dim() || g.dim() != dim()) throw std::invalid_argument("torus dimension mismatch");
    if (f.order() != order() || g.order() != order()) throw std::invalid_argument("formal series truncation order mismatch");
  }
};

// Translation-invariant product with the constant coefficients of the flat
// torus: e_m * e_n = exp((nu/2) lambda(m, n)) e_{m+n}, where lambda is the
// block pairing of modes and exp truncates at the series order.
class MoyalProduct final : public StarProduct {
 public:
  MoyalProduct(int dim, int order) : dim_(dim), order_(order) {
    Fun probe(dim, order);  // validates dim/order
    (void)probe;
  }

  int dim() const override { return dim_; }
  int order() const override { return order_; }
  std::string name() const override { return "moyal"; }

  Fun eval(const Fun &f, const Fun &g) const override {
    check_args(f, g);
    Fun r(dim_, order_);
    for (const auto &[m, cm] : f.coeffs())
      for (const auto &[n, cn] : g.coeffs()) {
        FormalScalar phase = half_lambda_exp(mode_lambda(m, n));
        r.add_coeff(mode_sum(m, n), cm * cn * phase);
      }
    return r;
  }

 private:
  FormalScalar half_lambda_exp(long lam) const {
    FormalScalar e(order_);
    GaussianRational term(1);
    for (int c = 0; c <= order_; ++c) {
      if (c > 0) term *= GaussianRational(make_rational(lam, 2 * c));
      e.set_coeff(c, term);
    }
    return e;
  }

  int dim_;
  int order_;
};

// nu^r cochain of a star product, evaluated on nu^0 functions and returned as
// a nu^0 function.
inline Fun star_cochain(const StarProduct &star, int r, const Fun &f, const Fun &g) {
  if (r < 0 || r > star.order()) throw std::out_of_range("cochain index exceeds truncation order");
  Fun prod = star.eval(f, g);
  Fun out(star.dim(), star.order());
  for (const auto &[m, c] : prod.coeffs()) out.add_coeff(m, FormalScalar::constant(star.order(), c.coeff(r)));
  return out;
}

// Associator (f*g)*h - f*(g*h); identically zero for a genuine product.
inline Fun associator(const StarProduct &star, const Fun &f, const Fun &g, const Fun &h) {
  return star.eval(star.eval(f, g), h) - star.eval(f, star.eval(g, h));
}

inline bool check_associativity(const StarProduct &star, const Fun &f, const Fun &g, const Fun &h) {
  return associator(star, f, g, h).is_zero();
}

// First-order compatibility with the symplectic structure: the nu^1 cochain
// antisymmetrizes to the Poisson bracket and the nu^0 cochain is the product.
inline bool check_first_order(const StarProduct &star, const Fun &f, const Fun &g) {
  if (star_cochain(star, 0, f, g) != f * g) return false;
  Fun anti = star_cochain(star, 1, f, g) - star_cochain(star, 1, g, f);
  return anti == poisson(f, g);
}

inline bool check_unit(const StarProduct &star, const Fun &f) {
  Fun one = star.unit();
  return star.eval(one, f) == f && star.eval(f, one) == f;
}

}  // namespace dq
