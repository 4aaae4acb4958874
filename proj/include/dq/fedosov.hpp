#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "dq/star.hpp"
#include "dq/weyl.hpp"

namespace dq {

using WSec = WeylSection<FormalScalar>;
using WSecT = WeylSection<TimeFun>;

template <class S>
WeylSection<TimeFun> section_to_time(const WeylSection<S> &a) {
  return a.map_cells([](const TorusFun<S> &f) { return f.map_scalars([](const S &s) { return to_time(s); }); });
}

// Scale a static section by a time-ring element.
inline WSecT section_time_scaled(const WSec &a, const TimeFun &t) {
  return a.map_cells([&](const TorusFun<FormalScalar> &f) { return f.map_scalars([&](const FormalScalar &s) { return t.scaled(s); }); });
}

// Connection, curvature perturbation and the solved normalization section
// of a quantization of the standard torus. All derived data lives at one
// (order, dmax) pair; the degree bound dmax must leave one spare degree
// above 2*order so that symbol-level results stay exact.
class FedosovData {
 public:
  FedosovData(const ConnectionData &connection, const TorusForm<FormalScalar> &curvature_form, int dmax)
      : dim_(connection.dim()), order_(connection.order()), dmax_(dmax), connection_(connection), omega_form_(curvature_form) {
    if (curvature_form.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (curvature_form.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
    if (curvature_form.deg() != 2) throw std::invalid_argument("Weyl curvature must be a two-form");
    if (dmax_ < 2 * order_ + 1) throw std::invalid_argument("degree bound too small for the requested order");
    if (!is_closed(curvature_form)) throw std::invalid_argument("Weyl curvature form must be closed");
    for (const auto &[idx, f] : curvature_form.comps()) {
      (void)idx;
      for (const auto &[m, c] : f.coeffs()) {
        (void)m;
        if (!c.coeff(0).is_zero()) throw std::invalid_argument("Weyl curvature form must start at order one");
      }
    }

    gamma_bar_ = connection_generator(connection_, dmax_);
    curv_ = curvature_generator(connection_, dmax_);
    omega_sec_ = section_of_form(omega_form_, dmax_);
    solve_normalization();
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int dmax() const { return dmax_; }
  const ConnectionData &connection() const { return connection_; }
  const TorusForm<FormalScalar> &curvature_form() const { return omega_form_; }
  const WSec &gamma_bar() const { return gamma_bar_; }
  const WSec &curvature_section() const { return curv_; }
  const WSec &normalization() const { return r_; }

  bool is_translation_invariant() const {
    if (!connection_.is_translation_invariant()) return false;
    for (const auto &[idx, f] : omega_form_.comps()) {
      (void)idx;
      for (const auto &[m, c] : f.coeffs()) {
        (void)c;
        if (!is_zero_mode(m)) return false;
      }
    }
    return true;
  }

  // The abelian connection differential D = covariant_d - delta + ad(r).
  template <class S>
  WeylSection<S> flat_d(const WeylSection<S> &a) const {
    return covariant_d(a, gamma(a)) - delta(a) + scaled_commutator(norm(a), a);
  }

  // Flat extension of a function: the unique flat section with symbol F.
  WSec q_extend(const TorusFun<FormalScalar> &F) const {
    check_fun(F);
    WSec out(dim_, order_, dmax_, 0);
    for (const auto &[m, c] : F.coeffs()) {
      const WSec &qm = q_mode(m);
      out += qm.scaled_formal(c);
    }
    return out;
  }

  WeylSection<TimeFun> q_extend(const TorusFun<TimeFun> &F) const {
    if (F.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (F.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
    WeylSection<TimeFun> out(dim_, order_, dmax_, 0);
    for (const auto &[m, c] : F.coeffs()) out += section_time_scaled(q_mode(m), c);
    return out;
  }

  // Weyl tail of the derivation attached to a closed one-form: the unique
  // section w with delta_inv(w) = 0 solving w = delta_inv(beta + del w +
  // (1/nu)[r, w]). For beta = dH this is (QH - H); the harmonic part enters
  // through the globally defined right-hand side even when H itself is
  // multivalued.
  template <class S>
  WeylSection<S> q_tail(const TorusForm<S> &beta) const {
    if (beta.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (beta.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
    if (beta.deg() != 1) throw std::invalid_argument("derivation data must be a one-form");
    WeylSection<S> beta_sec = section_of_form(beta, dmax_);
    WeylSection<S> w(dim_, order_, dmax_, 0);
    for (int sweep = 0; sweep <= dmax_ + 2; ++sweep) {
      WeylSection<S> next = delta_inv(beta_sec + covariant_d(w, gamma(w)) + scaled_commutator(norm(w), w));
      if (next == w) return w;
      w = next;
    }
    throw std::runtime_error("derivation tail recursion did not stabilize");
  }

  // Symbol-level action of the derivation attached to a closed one-form.
  template <class S>
  TorusFun<S> apply_derivation(const TorusForm<S> &beta, const TorusFun<S> &F) const {
    return sigma_symbol(scaled_commutator(q_tail(beta), q_extend(F)));
  }

  TorusFun<FormalScalar> star(const TorusFun<FormalScalar> &F, const TorusFun<FormalScalar> &G) const {
    return sigma_symbol(circ(q_extend(F), q_extend(G)));
  }

  TorusFun<TimeFun> star(const TorusFun<TimeFun> &F, const TorusFun<TimeFun> &G) const {
    return sigma_symbol(circ(q_extend(F), q_extend(G)));
  }

 private:
  void check_fun(const TorusFun<FormalScalar> &F) const {
    if (F.dim() != dim_) throw std::invalid_argument("torus dimension mismatch");
    if (F.order() != order_) throw std::invalid_argument("formal series truncation order mismatch");
  }

  // Static data embedded into the scalar ring of the argument.
  const WSec &gamma(const WSec &) const { return gamma_bar_; }
  const WSec &norm(const WSec &) const { return r_; }
  const WSecT &gamma(const WSecT &) const { return ensure_time(); }
  const WSecT &norm(const WSecT &) const {
    ensure_time();
    return r_time_;
  }

  const WSecT &ensure_time() const {
    if (!time_ready_) {
      gamma_time_ = section_to_time(gamma_bar_);
      r_time_ = section_to_time(r_);
      time_ready_ = true;
    }
    return gamma_time_;
  }

  void solve_normalization() {
    WSec r(dim_, order_, dmax_, 1);
    bool settled = false;
    for (int sweep = 0; sweep <= dmax_ + 2; ++sweep) {
      WSec next = delta_inv(curv_ + covariant_d(r, gamma_bar_) + scaled_commutator(r, r).scaled(GaussianRational(make_rational(1, 2))) - omega_sec_);
      if (next == r) {
        settled = true;
        break;
      }
      r = next;
    }
    if (!settled) throw std::runtime_error("normalization recursion did not stabilize");
    r_ = r;

    // Flatness certificate: the full curvature of flat_d must reduce to the
    // prescribed central form, and the normalization must be delta_inv
    // normalized with no terms below degree three. The residual is only
    // trustworthy below dmax, where delta r still sees the stored window.
    if (!delta_inv(r_).is_zero()) throw std::runtime_error("normalization is not delta-normalized");
    if (r_.degree_at_least(3) != r_) throw std::runtime_error("normalization has terms below degree three");
    WSec resid = curv_ + covariant_d(r_, gamma_bar_) - delta(r_) + scaled_commutator(r_, r_).scaled(GaussianRational(make_rational(1, 2))) - omega_sec_;
    if (!resid.degree_below(dmax_).is_zero()) throw std::runtime_error("flatness residual is nonzero");
  }

  const WSec &q_mode(const Mode &m) const {
    auto it = q_cache_.find(m);
    if (it != q_cache_.end()) return it->second;
    WSec base(dim_, order_, dmax_, 0);
    TorusFun<FormalScalar> em(dim_, order_);
    em.set_coeff(m, FormalScalar::constant(order_, GaussianRational(1)));
    base.add_cell(zero_mode(dim_), {}, em);
    WSec a = base;
    bool settled = false;
    for (int sweep = 0; sweep <= dmax_ + 2; ++sweep) {
      WSec next = base + delta_inv(covariant_d(a, gamma_bar_) + scaled_commutator(r_, a));
      if (next == a) {
        settled = true;
        break;
      }
      a = next;
    }
    if (!settled) throw std::runtime_error("flat extension recursion did not stabilize");
    return q_cache_.emplace(m, std::move(a)).first->second;
  }

  int dim_;
  int order_;
  int dmax_;
  ConnectionData connection_;
  TorusForm<FormalScalar> omega_form_;
  WSec gamma_bar_;
  WSec curv_;
  WSec omega_sec_;
  WSec r_;
  mutable std::map<Mode, WSec> q_cache_;
  mutable WSecT gamma_time_;
  mutable WSecT r_time_;
  mutable bool time_ready_ = false;
};

// Default degree bound leaving one spare degree over the symbol range plus
// headroom for the curvature recursion.
inline int default_dmax(int order) { return 2 * order + 2; }

inline std::shared_ptr<FedosovData> make_fedosov_data(const ConnectionData &connection, const TorusForm<FormalScalar> &curvature_form) {
  return std::make_shared<FedosovData>(connection, curvature_form, default_dmax(connection.order()));
}

// Star product interface backed by a quantization dataset.
class FedosovStar final : public StarProduct {
 public:
  explicit FedosovStar(std::shared_ptr<FedosovData> data) : data_(std::move(data)) {}

  int dim() const override { return data_->dim(); }
  int order() const override { return data_->order(); }
  std::string name() const override { return "fedosov"; }

  Fun eval(const Fun &f, const Fun &g) const override {
    check_args(f, g);
    return data_->star(f, g);
  }

  const FedosovData &data() const { return *data_; }
  std::shared_ptr<FedosovData> data_ptr() const { return data_; }

 private:
  std::shared_ptr<FedosovData> data_;
};

// Zero curvature perturbation of the given shape.
inline TorusForm<FormalScalar> zero_curvature_form(int dim, int order) { return TorusForm<FormalScalar>(dim, order, 2); }

// Constant-coefficient perturbation sum_r nu^r C_r dtheta_1 ^ dtheta_2.
inline TorusForm<FormalScalar> block_curvature_form(int dim, int order, const std::vector<GaussianRational> &coeffs) {
  if (static_cast<int>(coeffs.size()) != order) throw std::invalid_argument("expected one coefficient per positive order");
  TorusForm<FormalScalar> w(dim, order, 2);
  FormalScalar s(order);
  for (int r = 1; r <= order; ++r) s.set_coeff(r, coeffs[static_cast<size_t>(r - 1)]);
  if (!s.is_zero()) w.set_comp({1, 2}, TorusFun<FormalScalar>::constant(dim, order, s));
  return w;
}

}  // namespace dq
