#pragma once

#include <dq/flux.hpp>

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dq {

// Equivalence operators T = id + sum_{r>=1} nu^r T_r where each T_r is a
// finite sum of function coefficients times derivative monomials. Every term
// differentiates at least once, so constants are fixed and T is invertible
// order by order.

template <class S>
TorusFun<S> derivative_multi(TorusFun<S> f, const std::vector<int> &alpha) {
  for (int j = 1; j <= static_cast<int>(alpha.size()); ++j)
    for (int c = 0; c < alpha[static_cast<size_t>(j - 1)]; ++c) f = f.derivative(j);
  return f;
}

class EquivalenceOperator {
 public:
  using Key = std::pair<int, std::vector<int>>;

  EquivalenceOperator(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("torus dimension must be even");
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }

  void add_term(int r, const std::vector<int> &alpha, const Fun &coeff) {
    if (r < 1) throw std::invalid_argument("equivalence term needs a positive nu order");
    if (static_cast<int>(alpha.size()) != dim_) throw std::invalid_argument("torus dimension mismatch");
    int total = 0;
    for (int a : alpha) {
      if (a < 0) throw std::invalid_argument("derivative multiplicity must be nonnegative");
      total += a;
    }
    if (total < 1) throw std::invalid_argument("equivalence term must differentiate");
    if (coeff.dim() != dim_ || coeff.order() != order_) throw std::invalid_argument("torus dimension mismatch");
    if (r > order_) return;
    Key key{r, alpha};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      if (!coeff.is_zero()) terms_.emplace(std::move(key), coeff);
      return;
    }
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool is_identity() const { return terms_.empty(); }
  const std::map<Key, Fun> &terms() const { return terms_; }

  bool operator==(const EquivalenceOperator &o) const {
    return dim_ == o.dim_ && order_ == o.order_ && terms_ == o.terms_;
  }
  bool operator!=(const EquivalenceOperator &o) const { return !(*this == o); }

  template <class S>
  TorusFun<S> apply(const TorusFun<S> &F) const {
    if (F.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (F.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
    TorusFun<S> out = F;
    for (const auto &[key, c] : terms_) {
      TorusFun<S> lifted = c.map_scalars([](const FormalScalar &s) { return embed_formal<S>(s); });
      out += (lifted * derivative_multi(F, key.second)).nu_shifted(key.first);
    }
    return out;
  }

  // Order-by-order inversion: the correction part raises the nu order, so
  // the recursion G = F - (T - id)G stabilizes within the truncation.
  template <class S>
  TorusFun<S> apply_inverse(const TorusFun<S> &F) const {
    TorusFun<S> G = F;
    for (int sweep = 0; sweep <= order_ + 2; ++sweep) {
      TorusFun<S> next = F - (apply(G) - G);
      if (next == G) return G;
      G = std::move(next);
    }
    throw std::runtime_error("equivalence inversion did not stabilize");
  }

 private:
  int dim_;
  int order_;
  std::map<Key, Fun> terms_;
};

namespace detail {

// Visit every multi-index tau <= sigma together with the product of binomial
// coefficients binom(sigma_j, tau_j).
template <class Visit>
void leibniz_split(const std::vector<int> &sigma, const Visit &visit) {
  std::vector<int> tau(sigma.size(), 0);
  std::function<void(size_t, mpq_class)> rec = [&](size_t j, mpq_class w) {
    if (j == sigma.size()) {
      visit(tau, w);
      return;
    }
    mpq_class binom(1);
    for (int c = 0; c <= sigma[j]; ++c) {
      tau[j] = c;
      rec(j + 1, w * binom);
      binom = binom * (sigma[j] - c) / (c + 1);
    }
    tau[j] = 0;
  };
  rec(0, mpq_class(1));
}

}  // namespace detail

// Composite operator with (s o t)(F) = s(t(F)); the cross terms are expanded
// by the Leibniz rule so the result is again a sum of derivative monomials.
inline EquivalenceOperator compose(const EquivalenceOperator &s, const EquivalenceOperator &t) {
  if (s.dim() != t.dim()) throw std::invalid_argument("torus dimension mismatch");
  if (s.order() != t.order()) throw std::invalid_argument("formal series truncation order mismatch");
  EquivalenceOperator out(s.dim(), s.order());
  for (const auto &[key, c] : t.terms()) out.add_term(key.first, key.second, c);
  for (const auto &[key, c] : s.terms()) out.add_term(key.first, key.second, c);
  for (const auto &[skey, scoeff] : s.terms())
    for (const auto &[tkey, tcoeff] : t.terms()) {
      int r = skey.first + tkey.first;
      if (r > s.order()) continue;
      detail::leibniz_split(skey.second, [&](const std::vector<int> &tau, const mpq_class &weight) {
        std::vector<int> remaining(skey.second);
        std::vector<int> alpha(tkey.second);
        for (size_t j = 0; j < tau.size(); ++j) {
          remaining[j] -= tau[j];
          alpha[j] += tau[j];
        }
        Fun part = scoeff * derivative_multi(tcoeff, remaining);
        out.add_term(r, alpha, part.scaled(GaussianRational(weight)));
      });
    }
  return out;
}

// ---------------------------------------------------------------------------
// Transported products.

class TransportedStar final : public StarProduct {
 public:
  TransportedStar(std::shared_ptr<const StarProduct> base, EquivalenceOperator t)
      : base_(std::move(base)), t_(std::move(t)) {
    if (!base_) throw std::invalid_argument("transport needs a base product");
    if (base_->dim() != t_.dim()) throw std::invalid_argument("torus dimension mismatch");
    if (base_->order() != t_.order()) throw std::invalid_argument("formal series truncation order mismatch");
  }

  int dim() const override { return base_->dim(); }
  int order() const override { return base_->order(); }
  std::string name() const override { return base_->name() + "-transported"; }

  Fun eval(const Fun &f, const Fun &g) const override {
    check_args(f, g);
    return t_.apply(base_->eval(t_.apply_inverse(f), t_.apply_inverse(g)));
  }

  const StarProduct &base() const { return *base_; }
  const EquivalenceOperator &transport_operator() const { return t_; }

 private:
  std::shared_ptr<const StarProduct> base_;
  EquivalenceOperator t_;
};

inline TransportedStar transport(std::shared_ptr<const StarProduct> base, EquivalenceOperator t) {
  return TransportedStar(std::move(base), std::move(t));
}

// Automorphism seen through the transport: F -> T(A(T^{-1}F)). It preserves
// the transported product exactly when A preserves the base product.
class ConjugatedAutomorphism {
 public:
  ConjugatedAutomorphism(Automorphism inner, EquivalenceOperator t) : inner_(std::move(inner)), t_(std::move(t)) {
    if (inner_.data().dim() != t_.dim()) throw std::invalid_argument("torus dimension mismatch");
    if (inner_.data().order() != t_.order()) throw std::invalid_argument("formal series truncation order mismatch");
  }

  const Automorphism &inner() const { return inner_; }
  const EquivalenceOperator &transport_operator() const { return t_; }
  const std::vector<int> &winding() const { return inner_.winding(); }

  Fun apply(const Fun &F) const { return t_.apply(inner_.apply(t_.apply_inverse(F))); }

 private:
  Automorphism inner_;
  EquivalenceOperator t_;
};

inline ConjugatedAutomorphism conjugate_automorphism(Automorphism a, EquivalenceOperator t) {
  return ConjugatedAutomorphism(std::move(a), std::move(t));
}

// ---------------------------------------------------------------------------
// Loop flux through an abstract lifted derivation.

// Flux of the winding-v rotation loop for a product presented only through a
// lift of its derivations: `lift` applies the lifted rotation derivation to a
// time-dependent function and `lift_of_form` applies the lifted derivation of
// an arbitrary closed one-form to a static one. The loop is integrated by the
// same pulled-back recursion as the concrete flows, the endpoint logarithm is
// read off on unit modes, and the harmonic content is peeled one nu order at
// a time, checking linearity in the mode on a spread of witness modes.
inline H1Class flux_generic_lift(int dim, int order, const std::vector<int> &v,
                                 const std::function<TorusFun<TimeFun>(const TorusFun<TimeFun> &)> &lift,
                                 const std::function<Fun(const Form &, const Fun &)> &lift_of_form) {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("winding vector length does not match torus dimension");

  std::map<Mode, Fun> endpoint_cache;
  auto endpoint = [&](const Mode &m) -> const Fun & {
    auto it = endpoint_cache.find(m);
    if (it != endpoint_cache.end()) return it->second;
    Fun e = Fun::basis_mode(dim, order, m);
    TorusFun<TimeFun> F_t = e.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); });
    TorusFun<TimeFun> G = F_t;
    bool settled = false;
    for (int sweep = 0; sweep <= order + 2; ++sweep) {
      TorusFun<TimeFun> P = loop_pullback(G, v, 1);
      TorusFun<TimeFun> W = lift(P) - winding_derivative(P, v);
      TorusFun<TimeFun> I = loop_pullback(W, v, -1).map_scalars([](const TimeFun &c) { return c.integral_from_zero(); });
      TorusFun<TimeFun> next = F_t + I;
      if (next == G) {
        settled = true;
        break;
      }
      G = std::move(next);
    }
    if (!settled) throw std::runtime_error("flow recursion did not stabilize");
    Fun end = flow_endpoint(loop_pullback(G, v, 1));
    return endpoint_cache.emplace(m, std::move(end)).first->second;
  };

  auto around = [&](const Fun &f) {
    Fun out(dim, order);
    for (const auto &[m, c] : f.coeffs()) out += endpoint(m).scaled_formal(c);
    return out;
  };

  // Diagonal mode-m coefficient of the logarithm of the endpoint operator.
  auto log_diagonal = [&](const Mode &m) {
    Fun e = Fun::basis_mode(dim, order, m);
    Fun power = around(e) - e;
    if (!power.nu_filtered([](int k) { return k == 0; }).is_zero())
      throw std::runtime_error("loop endpoint has a nontrivial classical part");
    FormalScalar diag(order);
    GaussianRational sign(1);
    for (int k = 1; k <= order; ++k) {
      diag += power.coeff(m).scaled(sign * GaussianRational(make_rational(1, k)));
      if (k < order) power = around(power) - power;
      sign = -sign;
    }
    return diag;
  };

  std::vector<Mode> units;
  std::vector<Mode> witnesses;
  for (int c = 1; c <= dim; ++c) {
    Mode m = zero_mode(dim);
    m[static_cast<size_t>(c - 1)] = 1;
    units.push_back(m);
    Mode w = zero_mode(dim);
    w[static_cast<size_t>(c - 1)] = -2;
    w[static_cast<size_t>(c % dim)] = 1;
    witnesses.push_back(w);
  }
  witnesses.push_back(Mode(static_cast<size_t>(dim), 1));

  std::map<Mode, FormalScalar> diag;
  for (const Mode &m : units) diag.emplace(m, log_diagonal(m));
  for (const Mode &m : witnesses) diag.emplace(m, log_diagonal(m));

  // Peel the harmonic content order by order against the supplied lift.
  std::vector<std::vector<GaussianRational>> peeled;
  Form accumulated(dim, order, 1);
  for (int k = 1; k <= order; ++k) {
    auto residual = [&](const Mode &m) {
      FormalScalar model(order);
      if (!accumulated.is_zero()) model = lift_of_form(accumulated, Fun::basis_mode(dim, order, m)).coeff(m);
      return (diag.at(m) - model).coeff(k);
    };
    std::vector<GaussianRational> dual(static_cast<size_t>(dim));
    for (int c = 0; c < dim; ++c)
      dual[static_cast<size_t>(c)] = residual(units[static_cast<size_t>(c)]) * GaussianRational::i_times(-1);
    for (const Mode &m : witnesses) {
      GaussianRational predicted;
      for (int c = 0; c < dim; ++c)
        predicted += dual[static_cast<size_t>(c)] * GaussianRational(static_cast<long>(m[static_cast<size_t>(c)]));
      if (residual(m) != GaussianRational::i_times(1) * predicted) throw std::runtime_error("harmonic extraction failed");
    }
    std::vector<GaussianRational> h(static_cast<size_t>(dim));
    for (int d = 1; d <= dim; ++d) {
      GaussianRational s;
      for (int c = 1; c <= dim; ++c)
        if (omega_entry(c, d) != 0)
          s += dual[static_cast<size_t>(c - 1)] * GaussianRational(static_cast<long>(omega_entry(c, d)));
      h[static_cast<size_t>(d - 1)] = s;
    }
    peeled.push_back(h);
    for (int d = 1; d <= dim; ++d) {
      const GaussianRational &value = h[static_cast<size_t>(d - 1)];
      if (value.is_zero()) continue;
      accumulated.add_comp({d}, Fun::constant(dim, order, FormalScalar::monomial(order, k, value)));
    }
  }

  H1Class out = rotation_periods(dim, order, v);
  for (int k = 1; k <= order; ++k)
    for (int d = 0; d < dim; ++d)
      out[static_cast<size_t>(d)] -= FormalScalar::monomial(order, k, peeled[static_cast<size_t>(k - 1)][static_cast<size_t>(d)]);
  return out;
}

// Loop flux of the transported product, computed without the closed-form
// machinery of the base algebra: only the conjugated derivations are consumed.
inline H1Class flux_transported_loop(const std::shared_ptr<const FedosovData> &data, const EquivalenceOperator &T,
                                     const std::vector<int> &v) {
  int n = data->dim();
  int order = data->order();
  if (n != T.dim()) throw std::invalid_argument("torus dimension mismatch");
  if (order != T.order()) throw std::invalid_argument("formal series truncation order mismatch");
  std::vector<long> b(static_cast<size_t>(n), 0);
  for (int c = 1; c <= n; ++c) {
    long s = 0;
    for (int a = 1; a <= n; ++a) s += static_cast<long>(v[static_cast<size_t>(a - 1)]) * omega_entry(a, c);
    b[static_cast<size_t>(c - 1)] = s;
  }
  WeylSection<TimeFun> tail = data->q_tail(constant_one_form<TimeFun>(n, order, b));
  auto lift = [data, &T, tail](const TorusFun<TimeFun> &F) {
    return T.apply(sigma_symbol(scaled_commutator(tail, data->q_extend(T.apply_inverse(F)))));
  };
  auto lift_of_form = [data, &T](const Form &h, const Fun &F) {
    WeylSection<FormalScalar> th = data->q_tail(h);
    return T.apply(sigma_symbol(scaled_commutator(th, data->q_extend(T.apply_inverse(F)))));
  };
  return flux_generic_lift(n, order, v, lift, lift_of_form);
}

// Equivalence invariance of the loop flux: the transported product assigns
// the same class to the rotation loop as the base definition.
inline bool check_flux_invariance(const std::shared_ptr<const FedosovData> &data, const EquivalenceOperator &T,
                                  const std::vector<int> &v) {
  return flux_transported_loop(data, T, v) == flux_def_of_loop({data, v});
}

}  // namespace dq
