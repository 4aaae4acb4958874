#pragma once

#include <dq/fedosov.hpp>

#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dq {

// Derivations of the deformed algebra, one-parameter flows of such
// derivations, and the automorphisms they integrate to. Every flow endpoint
// is a torus translation by an integer winding composed with the exponential
// of a vertical exponent acting through the fiberwise commutator.

// ---------------------------------------------------------------------------
// Fiber helpers.

// Cells without fiber variables are central for the scaled commutator, so
// exponents are kept canonical by stripping them.
template <class S>
WeylSection<S> drop_fiber_free(const WeylSection<S> &a) {
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg());
  for (const auto &[key, f] : a.cells())
    if (abs_alpha(key.first) > 0) r.add_cell(key.first, key.second, f);
  return r;
}

// Multiply by the fiber coordinate y^b (1-based).
template <class S>
WeylSection<S> fiber_multiply(const WeylSection<S> &a, int b) {
  if (b < 1 || b > a.dim()) throw std::invalid_argument("fiber index out of range");
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg());
  for (const auto &[key, f] : a.cells()) {
    std::vector<int> alpha = key.first;
    alpha[static_cast<size_t>(b - 1)] += 1;
    r.add_cell(alpha, key.second, f);
  }
  return r;
}

// Shift every coefficient mode by m.
template <class S>
WeylSection<S> mode_shift(const WeylSection<S> &a, const Mode &m) {
  WeylSection<S> r(a.dim(), a.order(), a.dmax(), a.deg());
  for (const auto &[key, f] : a.cells()) {
    TorusFun<S> g(a.dim(), a.order());
    for (const auto &[mm, c] : f.coeffs()) g.set_coeff(mode_sum(mm, m), c);
    r.add_cell(key.first, key.second, g);
  }
  return r;
}

// exp of the scaled commutator with u, applied to x. A vertical exponent has
// degree at least three, so each bracket raises the degree and the series
// leaves the stored window; the cap is a stabilization certificate.
template <class S>
WeylSection<S> exp_adjoint(const WeylSection<S> &u, const WeylSection<S> &x) {
  WeylSection<S> sum = x;
  WeylSection<S> term = x;
  for (int k = 1; k <= u.dmax() + 3; ++k) {
    term = scaled_commutator(u, term).scaled(GaussianRational(make_rational(1, k)));
    if (term.is_zero()) return sum;
    sum += term;
  }
  throw std::runtime_error("adjoint exponential did not stabilize");
}

// One-form presenting the derivation ad(s) of a vertical degree-zero section:
// the exact part remembers that a flat s acts by the commutator with its own
// symbol, the rest is the y-free failure of flatness.
template <class S>
TorusForm<S> generator_one_form(const FedosovData &data, const WeylSection<S> &s) {
  if (s.deg() != 0) throw std::invalid_argument("generator must have form degree zero");
  return exterior_d(sigma_symbol(s)) - base_form_part(data.flat_d(s));
}

// ---------------------------------------------------------------------------
// Derivations.

class Derivation {
 public:
  Derivation(std::shared_ptr<const FedosovData> data, Form beta)
      : data_(std::move(data)), beta_(std::move(beta)) {
    if (!data_) throw std::invalid_argument("derivation needs ambient data");
    if (beta_.dim() != data_->dim()) throw std::invalid_argument("torus dimension mismatch");
    if (beta_.order() != data_->order()) throw std::invalid_argument("formal series truncation order mismatch");
    if (beta_.deg() != 1) throw std::invalid_argument("derivation data must be a one-form");
    if (!is_closed(beta_)) throw std::domain_error("form is not closed");
    tail_ = data_->q_tail(beta_);
  }

  const Form &one_form() const { return beta_; }
  const WSec &tail() const { return tail_; }
  const FedosovData &data() const { return *data_; }
  std::shared_ptr<const FedosovData> data_ptr() const { return data_; }

  Fun apply(const Fun &F) const { return sigma_symbol(scaled_commutator(tail_, data_->q_extend(F))); }

  bool is_quasi_inner() const {
    for (const auto &p : h1_class(beta_))
      if (!p.is_zero()) return false;
    return true;
  }

  // Zero-mean potential; throws "not exact" when the class is nonzero.
  Fun hamiltonian() const { return primitive(beta_); }

 private:
  std::shared_ptr<const FedosovData> data_;
  Form beta_;
  WSec tail_;
};

inline Derivation quasi_inner_derivation(std::shared_ptr<const FedosovData> data, const Fun &H) {
  return Derivation(std::move(data), exterior_d(H));
}

// Bracket of two derivations. The commutator of the tails is a vertical
// section whose adjoint action is the operator bracket.
inline Derivation commutator_derivation(const Derivation &a, const Derivation &b) {
  if (a.data_ptr() != b.data_ptr()) throw std::invalid_argument("ambient data mismatch");
  WSec s = scaled_commutator(a.tail(), b.tail());
  return Derivation(a.data_ptr(), generator_one_form(a.data(), s));
}

// ---------------------------------------------------------------------------
// Flow generators.

// Family of derivation one-forms over the exact time ring. The order-zero
// part must be a harmonic form, constant in time, whose dual vector field has
// integer entries; it is the winding of the classical flow. Everything else
// is the moving part beta^+, of order at least one.
class PathGenerator {
 public:
  PathGenerator(std::shared_ptr<const FedosovData> data, TorusForm<TimeFun> beta)
      : data_(std::move(data)), beta_(std::move(beta)) {
    if (!data_) throw std::invalid_argument("path generator needs ambient data");
    if (beta_.dim() != data_->dim()) throw std::invalid_argument("torus dimension mismatch");
    if (beta_.order() != data_->order()) throw std::invalid_argument("formal series truncation order mismatch");
    if (beta_.deg() != 1) throw std::invalid_argument("derivation data must be a one-form");
    if (!is_closed(beta_)) throw std::domain_error("form is not closed");

    int n = data_->dim();
    std::vector<GaussianRational> b0(static_cast<size_t>(n));
    for (int j = 1; j <= n; ++j) {
      TorusFun<TimeFun> comp = beta_.comp({j});
      for (const auto &[m, c] : comp.coeffs()) {
        TimeFun c0 = c.filtered([](int k) { return k == 0; });
        if (c0.is_zero()) continue;
        if (!is_zero_mode(m)) throw std::domain_error("unsupported path generator");
        FormalScalar at0 = c0.eval_unit(false);
        if (c0 != TimeFun::constant(at0)) throw std::domain_error("unsupported path generator");
        b0[static_cast<size_t>(j - 1)] = at0.coeff(0);
      }
    }
    v_.assign(static_cast<size_t>(n), 0);
    for (int c = 1; c <= n; ++c) {
      GaussianRational g;
      for (int b = 1; b <= n; ++b) {
        int l = lambda_entry(b, c);
        if (l != 0) g += b0[static_cast<size_t>(b - 1)] * GaussianRational(static_cast<long>(l));
      }
      if (g.im != 0 || g.re.get_den() != 1 || !g.re.get_num().fits_slong_p())
        throw std::domain_error("unsupported path generator");
      v_[static_cast<size_t>(c - 1)] = static_cast<int>(g.re.get_num().get_si());
    }
    classical_ = Form(n, data_->order(), 1);
    for (int j = 1; j <= n; ++j) {
      const GaussianRational &g = b0[static_cast<size_t>(j - 1)];
      if (!g.is_zero()) classical_.set_comp({j}, Fun::constant(n, data_->order(), FormalScalar::constant(data_->order(), g)));
    }
    plus_ = beta_.nu_filtered([](int k) { return k >= 1; });
  }

  const TorusForm<TimeFun> &one_form() const { return beta_; }
  const std::vector<int> &winding() const { return v_; }
  const Form &classical_form() const { return classical_; }
  const TorusForm<TimeFun> &plus_part() const { return plus_; }
  const FedosovData &data() const { return *data_; }
  std::shared_ptr<const FedosovData> data_ptr() const { return data_; }

  bool is_still() const {
    for (int c : v_)
      if (c != 0) return false;
    return true;
  }

 private:
  std::shared_ptr<const FedosovData> data_;
  TorusForm<TimeFun> beta_;
  std::vector<int> v_;
  Form classical_;
  TorusForm<TimeFun> plus_;
};

// Constant generator of the translation flow with winding v.
inline PathGenerator rotation_generator(std::shared_ptr<const FedosovData> data, const std::vector<int> &v) {
  int n = data->dim();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("torus dimension mismatch");
  std::vector<long> b(static_cast<size_t>(n), 0);
  for (int c = 1; c <= n; ++c) {
    long s = 0;
    for (int a = 1; a <= n; ++a) s += static_cast<long>(v[static_cast<size_t>(a - 1)]) * omega_entry(a, c);
    b[static_cast<size_t>(c - 1)] = s;
  }
  int order = data->order();
  return PathGenerator(std::move(data), constant_one_form<TimeFun>(n, order, b));
}

// Exact generator d(H_t); the winding is zero.
inline PathGenerator quasi_inner_path(std::shared_ptr<const FedosovData> data, const TorusFun<TimeFun> &H) {
  return PathGenerator(std::move(data), exterior_d(H));
}

// ---------------------------------------------------------------------------
// Function-level flow.

// Directional derivative along the constant integer field v.
template <class S>
TorusFun<S> winding_derivative(const TorusFun<S> &F, const std::vector<int> &v) {
  TorusFun<S> r(F.dim(), F.order());
  for (int c = 1; c <= F.dim(); ++c) {
    long vc = v[static_cast<size_t>(c - 1)];
    if (vc != 0) r += F.derivative(c).scaled(GaussianRational(vc));
  }
  return r;
}

// Solve dA_t/dt = D_{beta_t} A_t, A_0 = id, applied to F. The unknown is
// pulled back along the classical flow so the recursion gains one order of
// nu per sweep; the returned family is t -> A_t F.
inline TorusFun<TimeFun> flow_family(const PathGenerator &gen, const Fun &F) {
  const FedosovData &data = gen.data();
  const std::vector<int> &v = gen.winding();
  WSecT tail = data.q_tail(gen.one_form());
  TorusFun<TimeFun> F_t = F.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); });
  TorusFun<TimeFun> G = F_t;
  for (int sweep = 0; sweep <= data.order() + 2; ++sweep) {
    TorusFun<TimeFun> P = loop_pullback(G, v, 1);
    TorusFun<TimeFun> W = sigma_symbol(scaled_commutator(tail, data.q_extend(P))) - winding_derivative(P, v);
    TorusFun<TimeFun> I = loop_pullback(W, v, -1).map_scalars([](const TimeFun &c) { return c.integral_from_zero(); });
    TorusFun<TimeFun> next = F_t + I;
    if (next == G) return loop_pullback(G, v, 1);
    G = std::move(next);
  }
  throw std::runtime_error("flow recursion did not stabilize");
}

inline Fun flow_endpoint(const TorusFun<TimeFun> &family) {
  return family.map_scalars([](const TimeFun &c) { return c.eval_unit(true); });
}

// ---------------------------------------------------------------------------
// Automorphisms.

class Automorphism {
 public:
  Automorphism(std::shared_ptr<const FedosovData> data, std::vector<int> winding, const WSec &exponent)
      : data_(std::move(data)), v_(std::move(winding)) {
    if (!data_) throw std::invalid_argument("automorphism needs ambient data");
    if (static_cast<int>(v_.size()) != data_->dim()) throw std::invalid_argument("torus dimension mismatch");
    u_ = drop_fiber_free(exponent);
    if (u_.dim() != data_->dim() || u_.order() != data_->order() || u_.dmax() != data_->dmax() || u_.deg() != 0)
      throw std::invalid_argument("section truncation mismatch");
    if (u_.degree_at_least(3) != u_) throw std::invalid_argument("automorphism exponent has low-degree terms");
  }

  static Automorphism identity(std::shared_ptr<const FedosovData> data) {
    int n = data->dim();
    WSec zero(n, data->order(), data->dmax(), 0);
    return Automorphism(std::move(data), std::vector<int>(static_cast<size_t>(n), 0), zero);
  }

  const std::vector<int> &winding() const { return v_; }
  const WSec &exponent() const { return u_; }
  const FedosovData &data() const { return *data_; }
  std::shared_ptr<const FedosovData> data_ptr() const { return data_; }

  // Integer translations act trivially on Fourier modes, so the function
  // action reduces to the symbol of the exponential.
  Fun apply(const Fun &F) const { return sigma_symbol(exp_adjoint(u_, data_->q_extend(F))); }

  bool operator==(const Automorphism &o) const { return v_ == o.v_ && u_ == o.u_; }
  bool operator!=(const Automorphism &o) const { return !(*this == o); }

 private:
  std::shared_ptr<const FedosovData> data_;
  std::vector<int> v_;
  WSec u_;
};

inline Automorphism invert(const Automorphism &a) {
  std::vector<int> v = a.winding();
  for (int &c : v) c = -c;
  return Automorphism(a.data_ptr(), std::move(v), -a.exponent());
}

namespace detail {

// Rebuild a vertical section from its fiber pairings P_j = sc(c, y^j):
// dc/dy^d = sum_j P_j w_jd, then the Euler identity restores c cell by cell.
inline WSec exponent_from_pairings(const FedosovData &data, const std::vector<WSec> &P) {
  int n = data.dim();
  WSec weighted(n, data.order(), data.dmax(), 0);
  for (int d = 1; d <= n; ++d) {
    WSec partial(n, data.order(), data.dmax(), 0);
    for (int j = 1; j <= n; ++j) {
      int w = omega_entry(j, d);
      if (w != 0) partial += P[static_cast<size_t>(j - 1)].scaled(GaussianRational(static_cast<long>(w)));
    }
    weighted += fiber_multiply(partial, d);
  }
  WSec out(n, data.order(), data.dmax(), 0);
  for (const auto &[key, f] : weighted.cells())
    out.add_cell(key.first, key.second, f.scaled(GaussianRational(make_rational(1, abs_alpha(key.first)))));
  return out;
}

// Lowest Weyl degree with a nonzero slice in any of the given residuals, or
// -1 when all are zero.
inline int lowest_degree(const std::vector<WSec> &R, int dmax) {
  for (int d = 0; d <= dmax; ++d)
    for (const WSec &r : R)
      if (!r.degree_slice(d).is_zero()) return d;
  return -1;
}

// Vertical exponent of a section map known to be exp of a scaled commutator;
// fiber-coordinate probes pin the pairings degree by degree.
inline WSec exponent_of_section_map(const FedosovData &data, const std::function<WSec(const WSec &)> &E) {
  int n = data.dim();
  std::vector<WSec> probes;
  std::vector<WSec> targets;
  probes.reserve(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) {
    probes.push_back(y_coordinate<FormalScalar>(n, data.order(), data.dmax(), j));
    targets.push_back(E(probes.back()).degree_below(data.dmax()));
  }
  WSec u(n, data.order(), data.dmax(), 0);
  for (int round = 0; round <= data.dmax() + 2; ++round) {
    std::vector<WSec> R;
    R.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      R.push_back((targets[static_cast<size_t>(j)] - exp_adjoint(u, probes[static_cast<size_t>(j)])).degree_below(data.dmax()));
    int dstar = lowest_degree(R, data.dmax());
    if (dstar < 0) return u;
    std::vector<WSec> P;
    P.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) P.push_back(R[static_cast<size_t>(j)].degree_slice(dstar));
    u += exponent_from_pairings(data, P);
  }
  throw std::runtime_error("vertical logarithm did not stabilize");
}

}  // namespace detail

// Vertical exponent of a function map known to be the symbol action of exp of
// a scaled commutator. Probing with unit modes isolates the pairings: the
// degree-one part of the flat extension of e_m is i m_a y^a e_m.
inline WSec log_vertical_action(const FedosovData &data, const std::function<Fun(const Fun &)> &act) {
  int n = data.dim();
  int order = data.order();
  std::vector<Mode> modes;
  std::vector<WSec> probes;
  std::vector<WSec> targets;
  for (int c = 1; c <= n; ++c) {
    Mode m = zero_mode(n);
    m[static_cast<size_t>(c - 1)] = 1;
    modes.push_back(m);
    probes.push_back(data.q_extend(Fun::basis_mode(n, order, m)));
    targets.push_back(data.q_extend(act(Fun::basis_mode(n, order, m))).degree_below(data.dmax()));
  }
  WSec u(n, order, data.dmax(), 0);
  bool settled = false;
  for (int round = 0; round <= data.dmax() + 2; ++round) {
    std::vector<WSec> R;
    R.reserve(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c)
      R.push_back((targets[static_cast<size_t>(c)] - exp_adjoint(u, probes[static_cast<size_t>(c)])).degree_below(data.dmax()));
    int dstar = detail::lowest_degree(R, data.dmax());
    if (dstar < 0) {
      settled = true;
      break;
    }
    std::vector<WSec> P;
    P.reserve(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      Mode neg = zero_mode(n);
      neg[static_cast<size_t>(c)] = -1;
      P.push_back(mode_shift(R[static_cast<size_t>(c)].degree_slice(dstar), neg).scaled(GaussianRational::i_times(-1)));
    }
    u += detail::exponent_from_pairings(data, P);
  }
  if (!settled) throw std::runtime_error("vertical logarithm did not stabilize");

  Mode mstar(static_cast<size_t>(n), 1);
  Fun estar = Fun::basis_mode(n, order, mstar);
  WSec check = (data.q_extend(act(estar)) - exp_adjoint(u, data.q_extend(estar))).degree_below(data.dmax());
  if (!check.is_zero()) throw std::runtime_error("vertical logarithm verification failed");
  return u;
}

inline WSec log_vertical(const Automorphism &a) {
  return log_vertical_action(a.data(), [&](const Fun &f) { return a.apply(f); });
}

// Composition through the section action; the result is certified against
// the composed function action on unit modes.
inline Automorphism compose(const Automorphism &a, const Automorphism &b) {
  if (a.data_ptr() != b.data_ptr()) throw std::invalid_argument("ambient data mismatch");
  const FedosovData &data = a.data();
  WSec u = detail::exponent_of_section_map(data, [&](const WSec &x) { return exp_adjoint(a.exponent(), exp_adjoint(b.exponent(), x)); });
  std::vector<int> v = a.winding();
  for (int c = 0; c < data.dim(); ++c) v[static_cast<size_t>(c)] += b.winding()[static_cast<size_t>(c)];
  Automorphism out(a.data_ptr(), std::move(v), u);
  for (int c = 1; c <= data.dim(); ++c) {
    for (int sign : {1, -1}) {
      Mode m = zero_mode(data.dim());
      m[static_cast<size_t>(c - 1)] = sign;
      Fun e = Fun::basis_mode(data.dim(), data.order(), m);
      if (out.apply(e) != a.apply(b.apply(e))) throw std::runtime_error("composition certificate failed");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flows of path generators.

// A solved flow: the generator with its endpoint. When the closed-form route
// applies the whole exponent family U_t is kept; path composition needs it.
class AutPath {
 public:
  AutPath(PathGenerator gen, Automorphism end, bool closed_form, WSecT family)
      : gen_(std::move(gen)), end_(std::move(end)), closed_(closed_form), family_(std::move(family)) {}

  const PathGenerator &generator() const { return gen_; }
  const Automorphism &endpoint() const { return end_; }
  bool has_closed_form() const { return closed_; }

  const WSecT &exponent_family() const {
    if (!closed_) throw std::domain_error("no closed-form exponent available");
    return family_;
  }

 private:
  PathGenerator gen_;
  Automorphism end_;
  bool closed_;
  WSecT family_;
};

// Integrate a generator to its endpoint automorphism. For translation
// invariant data (and for any still path) the vertical part of the flow has
// the explicit generator
//   g_t = tail(beta^0) + i_v(delta_gen + gamma_bar + r) + rotate^{-1}(tail(beta^+_t)),
// whose degree starts at three. When the running integral commutes with the
// generator, exp of the integral solves the flow in closed form; otherwise
// the endpoint is recovered from the function-level recursion. Both routes
// are certified against each other on unit modes.
inline AutPath heisenberg_flow(const PathGenerator &gen) {
  const FedosovData &data = gen.data();
  std::shared_ptr<const FedosovData> dptr = gen.data_ptr();
  const std::vector<int> &v = gen.winding();
  int n = data.dim();

  if (gen.is_still() || data.is_translation_invariant()) {
    WSec fixed = data.q_tail(gen.classical_form());
    if (!gen.is_still()) {
      WSec rho = delta_generator<FormalScalar>(n, data.order(), data.dmax()) + data.gamma_bar() + data.normalization();
      fixed += i_const_field(rho, v);
    }
    WSecT g = section_to_time(fixed) + rotate_section(data.q_tail(gen.plus_part()), v, -1);
    if (g.degree_at_least(3) != g) throw std::runtime_error("flow generator has low-degree terms");
    WSecT G = g.map_cells([](const TorusFun<TimeFun> &f) {
      return f.map_scalars([](const TimeFun &c) { return c.integral_from_zero(); });
    });
    if (drop_fiber_free(scaled_commutator(G, g)).is_zero()) {
      WSec u = G.map_cells([](const TorusFun<TimeFun> &f) {
        return f.map_scalars([](const TimeFun &c) { return c.eval_unit(true); });
      });
      Automorphism end(dptr, v, u);
      for (int c = 1; c <= n; ++c) {
        for (int sign : {1, -1}) {
          Mode m = zero_mode(n);
          m[static_cast<size_t>(c - 1)] = sign;
          Fun e = Fun::basis_mode(n, data.order(), m);
          if (end.apply(e) != flow_endpoint(flow_family(gen, e))) throw std::runtime_error("flow certificate failed");
        }
      }
      return AutPath(gen, std::move(end), true, std::move(G));
    }
  }

  WSec u = log_vertical_action(data, [&](const Fun &f) { return flow_endpoint(flow_family(gen, f)); });
  Automorphism end(dptr, v, u);
  return AutPath(gen, std::move(end), false, WSecT(n, data.order(), data.dmax(), 0));
}

// Generator of the pointwise composite t -> A_t B_t: the left generator plus
// the left-flow conjugate of the right one. The conjugate of ad(w) is ad of
// the transformed section, so the extra term is its presenting one-form.
inline PathGenerator compose_generators(const AutPath &a, const PathGenerator &b) {
  if (a.generator().data_ptr() != b.data_ptr()) throw std::invalid_argument("ambient data mismatch");
  const FedosovData &data = b.data();
  WSecT wb = data.q_tail(b.one_form());
  WSecT conj = rotate_section(exp_adjoint(a.exponent_family(), wb), a.generator().winding(), 1);
  TorusForm<TimeFun> extra = generator_one_form(data, conj);
  return PathGenerator(b.data_ptr(), a.generator().one_form() + extra);
}

// Zero-mean time-dependent potential of a flux-exact generator; the running
// integral of every harmonic coefficient must vanish identically.
inline TorusFun<TimeFun> hamiltonianize(const PathGenerator &gen) {
  int n = gen.data().dim();
  Mode z = zero_mode(n);
  for (int j = 1; j <= n; ++j) {
    TimeFun c = gen.one_form().comp({j}).coeff(z);
    if (!c.integral_from_zero().is_zero()) throw std::domain_error("path not flux-exact");
  }
  return primitive(gen.one_form());
}

}  // namespace dq
