#pragma once

#include <dq/equivalence.hpp>

#include <chrono>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

// Golden-value suite: every check is an exact equality over Gaussian
// rationals, plus the stated wall-clock budgets. One report line per
// criterion.

namespace dqacc {

using namespace dq;

constexpr unsigned long kDefaultSeed = 740193;

struct CriterionResult {
  std::string name;
  bool pass = true;
  std::string note;
  double seconds = 0.0;
};

namespace detail {

inline GaussianRational gr(long num, long den = 1) { return GaussianRational(make_rational(num, den)); }

inline std::shared_ptr<FedosovData> flat_data(int order, const std::vector<GaussianRational> &coeffs, int dmax = 0) {
  std::vector<GaussianRational> padded(static_cast<size_t>(order));
  for (size_t k = 0; k < coeffs.size() && k < padded.size(); ++k) padded[k] = coeffs[k];
  return std::make_shared<FedosovData>(ConnectionData::flat(2, order), block_curvature_form(2, order, padded),
                                       dmax > 0 ? dmax : default_dmax(order));
}

inline std::shared_ptr<FedosovData> curved_data(int order, long c1, int dmax = 0) {
  ConnectionData cd(2, order);
  cd.set_lowered(1, 1, 1, Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  cd.set_lowered(2, 2, 2, Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  std::vector<GaussianRational> coeffs(static_cast<size_t>(order));
  coeffs[0] = gr(c1);
  return std::make_shared<FedosovData>(cd, block_curvature_form(2, order, coeffs), dmax > 0 ? dmax : default_dmax(order));
}

inline FormalScalar golden_series(int order, long c1, long c2) {
  FormalScalar s = FormalScalar::constant(order, gr(1));
  s -= FormalScalar::monomial(order, 1, gr(c1));
  if (order >= 2) s -= FormalScalar::monomial(order, 2, gr(c2));
  return s;
}

inline H1Class h1_sum(const H1Class &a, const H1Class &b) {
  H1Class out = a;
  for (size_t d = 0; d < out.size(); ++d) out[d] += b[d];
  return out;
}

inline bool h1_equal_through(const H1Class &a, const H1Class &b, int upto) {
  if (a.size() != b.size()) return false;
  for (size_t d = 0; d < a.size(); ++d)
    for (int k = 0; k <= upto; ++k)
      if (a[d].coeff(k) != b[d].coeff(k)) return false;
  return true;
}

// Deterministic across platforms: mt19937 output is standardized, the
// distribution adapters are not, so take residues directly.
inline long pick(std::mt19937 &rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
}

inline GaussianRational random_coeff(std::mt19937 &rng) {
  long num = pick(rng, -4, 4);
  if (num == 0) num = 1;
  long den = std::vector<long>{1, 2, 3, 5}[static_cast<size_t>(pick(rng, 0, 3))];
  if (pick(rng, 0, 2) == 0) return GaussianRational(make_rational(0), make_rational(num, den));
  return gr(num, den);
}

inline Mode random_mode(std::mt19937 &rng, int dim, int bound) {
  Mode m(static_cast<size_t>(dim));
  for (int c = 0; c < dim; ++c) m[static_cast<size_t>(c)] = static_cast<int>(pick(rng, -bound, bound));
  return m;
}

inline Fun random_fun(std::mt19937 &rng, int dim, int order, int bound, int cells) {
  Fun f(dim, order);
  for (int c = 0; c < cells; ++c)
    f.add_coeff(random_mode(rng, dim, bound),
                FormalScalar::monomial(order, static_cast<int>(pick(rng, 0, order)), random_coeff(rng)));
  return f;
}

inline WeylSection<FormalScalar> random_section(std::mt19937 &rng, int dim, int order, int dmax, int deg) {
  WeylSection<FormalScalar> s(dim, order, dmax, deg);
  for (int c = 0; c < 3; ++c) {
    std::vector<int> alpha(static_cast<size_t>(dim), 0);
    int total = static_cast<int>(pick(rng, 0, 3));
    for (int t = 0; t < total; ++t) alpha[static_cast<size_t>(pick(rng, 0, dim - 1))] += 1;
    std::vector<int> J;
    if (deg == 1) J.push_back(static_cast<int>(pick(rng, 1, dim)));
    s.add_cell(alpha, J, random_fun(rng, dim, order, 1, 2));
  }
  return s;
}

template <class Body>
CriterionResult timed(const std::string &name, Body body) {
  CriterionResult r;
  r.name = name;
  auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception &e) {
    r.pass = false;
    r.note = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline void fail(CriterionResult &r, const std::string &note) {
  r.pass = false;
  if (r.note.empty()) r.note = note;
}

// Shared golden loop table: winding, expected class as (left component sign,
// right component sign) multiples of the series.
struct GoldenLoop {
  std::vector<int> v;
  int left;   // coefficient of dtheta_1 in units of the series
  int right;  // coefficient of dtheta_2
};

inline std::vector<GoldenLoop> golden_loops() {
  return {{{1, 0}, 0, 1}, {{0, 1}, -1, 0}, {{0, -1}, 1, 0}};
}

}  // namespace detail

// 1. Rotation loops over the flat golden backgrounds carry the closed-form
// series class.
inline CriterionResult criterion_golden_flux(int order) {
  using namespace detail;
  return timed("golden rotation fluxes", [&](CriterionResult &r) {
    for (const auto &[c1, c2] : std::vector<std::pair<long, long>>{{1, 0}, {2, 5}, {-1, 3}}) {
      auto start = std::chrono::steady_clock::now();
      auto data = flat_data(order, {gr(c1), gr(c2)});
      FormalScalar series = golden_series(order, c1, c2);
      FormalScalar zero(order);
      for (const GoldenLoop &loop : golden_loops()) {
        H1Class got = flux_def_of_loop({data, loop.v});
        H1Class want = {loop.left == 0 ? zero : series.scaled(gr(loop.left)),
                        loop.right == 0 ? zero : series.scaled(gr(loop.right))};
        if (got != want) fail(r, "wrong class for C1=" + std::to_string(c1) + " C2=" + std::to_string(c2));
      }
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (s >= 60.0) fail(r, "pair exceeded 60s");
    }
  });
}

// 2. The lift definition and the closed formula agree, including a curved
// constant-coefficient connection.
inline CriterionResult criterion_closed_form(int order) {
  using namespace detail;
  return timed("closed form flux cross-check", [&](CriterionResult &r) {
    std::vector<std::shared_ptr<FedosovData>> configs;
    for (const auto &[c1, c2] : std::vector<std::pair<long, long>>{{1, 0}, {2, 5}, {-1, 3}})
      configs.push_back(flat_data(order, {gr(c1), gr(c2)}));
    configs.push_back(curved_data(order, 1));
    for (const auto &data : configs) {
      auto start = std::chrono::steady_clock::now();
      for (const std::vector<int> &v : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
        if (flux_def_of_loop({data, v}) != flux_def_closed_form({data, v})) fail(r, "routes disagree");
      }
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (s >= 60.0) fail(r, "configuration exceeded 60s");
    }
  });
}

// 3. With a flat connection and zero curvature the quantized product equals
// the invariant oracle on all small mode pairs.
inline CriterionResult criterion_oracle_gate(int order, int bound, int dmax = 0) {
  using namespace detail;
  return timed("flat zero-curvature product matches the invariant oracle", [&](CriterionResult &r) {
    auto data = flat_data(order, {}, dmax);
    FedosovStar fed(data);
    MoyalProduct moyal(2, order);
    for (int m1 = -bound; m1 <= bound; ++m1)
      for (int m2 = -bound; m2 <= bound; ++m2)
        for (int n1 = -bound; n1 <= bound; ++n1)
          for (int n2 = -bound; n2 <= bound; ++n2) {
            Fun em = Fun::basis_mode(2, order, {m1, m2});
            Fun en = Fun::basis_mode(2, order, {n1, n2});
            if (fed.eval(em, en) != moyal.eval(em, en)) {
              fail(r, "pair (" + std::to_string(m1) + "," + std::to_string(m2) + ")x(" + std::to_string(n1) + "," +
                          std::to_string(n2) + ") differs");
              return;
            }
          }
  });
}

// 4. Star axioms for both products: constant term, bracket antisymmetry,
// unit stays central through every cochain.
inline CriterionResult criterion_star_axioms() {
  using namespace detail;
  return timed("star product axioms", [&](CriterionResult &r) {
    int order = 3;
    auto data = flat_data(order, {gr(1), gr(5)});
    FedosovStar fed(data);
    MoyalProduct moyal(2, order);
    std::vector<Fun> probes;
    probes.push_back(Fun::basis_mode(2, order, {1, 0}));
    probes.push_back(Fun::basis_mode(2, order, {0, 1}));
    Fun mixed(2, order);
    mixed.add_coeff({1, 1}, FormalScalar::constant(order, gr(2)));
    mixed.add_coeff({-2, 1}, FormalScalar::constant(order, gr(1, 3)));
    probes.push_back(mixed);
    Fun unit = Fun::constant(2, order, FormalScalar::constant(order, gr(1)));
    for (const StarProduct *star : std::initializer_list<const StarProduct *>{&fed, &moyal}) {
      for (const Fun &f : probes) {
        if (!check_unit(*star, f)) fail(r, star->name() + " unit fails");
        for (const Fun &g : probes)
          if (!check_first_order(*star, f, g)) fail(r, star->name() + " first order fails");
        for (int k = 1; k <= order; ++k) {
          if (!star_cochain(*star, k, unit, f).is_zero()) fail(r, star->name() + " left unit cochain");
          if (!star_cochain(*star, k, f, unit).is_zero()) fail(r, star->name() + " right unit cochain");
        }
      }
    }
  });
}

// 5. Seeded associativity sample at one extra order of truncation.
inline CriterionResult criterion_associativity(unsigned long seed) {
  using namespace detail;
  return timed("associativity on seeded mode triples", [&](CriterionResult &r) {
    int order = 4;
    std::mt19937 rng(static_cast<unsigned int>(seed));
    auto data = flat_data(order, {gr(1)});
    FedosovStar fed(data);
    MoyalProduct moyal(2, order);
    auto start = std::chrono::steady_clock::now();
    for (int c = 0; c < 100; ++c) {
      Fun f = Fun::mode(2, order, random_mode(rng, 2, 2), FormalScalar::constant(order, random_coeff(rng)));
      Fun g = Fun::mode(2, order, random_mode(rng, 2, 2), FormalScalar::constant(order, random_coeff(rng)));
      Fun h = Fun::mode(2, order, random_mode(rng, 2, 2), FormalScalar::constant(order, random_coeff(rng)));
      if (!check_associativity(moyal, f, g, h)) fail(r, "oracle triple " + std::to_string(c));
      if (!check_associativity(fed, f, g, h)) fail(r, "quantized triple " + std::to_string(c));
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s >= 300.0) fail(r, "sample exceeded 5 minutes");
  });
}

// 6. Internal identities of the graded recursion: fiberwise Hodge split, flat
// differential squaring to zero, normalization fixed point, symbol section.
inline CriterionResult criterion_internal_identities(unsigned long seed) {
  using namespace detail;
  return timed("weyl bundle internal identities", [&](CriterionResult &r) {
    int order = 3;
    std::mt19937 rng(static_cast<unsigned int>(seed) + 1);
    auto data = curved_data(order, 1);

    // The split is checked with one degree of headroom over the working bound:
    // delta_inv raises the Weyl degree, so sections whose top cells already
    // saturate dmax would lose that slice in the intermediate.
    for (int c = 0; c < 50; ++c) {
      int deg = c % 2;
      WeylSection<FormalScalar> a = random_section(rng, data->dim(), data->order(), data->dmax() + 2, deg);
      WeylSection<FormalScalar> split = delta_inv(delta(a));
      if (deg == 1) split += delta(delta_inv(a));
      WeylSection<FormalScalar> expected = a;
      if (deg == 0) expected.set_cell(zero_mode(data->dim()), {}, Fun(data->dim(), order));
      if (split != expected) fail(r, "hodge split fails on section " + std::to_string(c));
    }

    for (int c = 0; c < 50; ++c) {
      WeylSection<FormalScalar> a = random_section(rng, data->dim(), data->order(), data->dmax(), c % 2);
      if (!data->flat_d(data->flat_d(a)).degree_below(data->dmax() - 1).is_zero())
        fail(r, "differential square fails on section " + std::to_string(c));
    }

    const WeylSection<FormalScalar> &rr = data->normalization();
    WeylSection<FormalScalar> omega_sec = section_of_form(data->curvature_form(), data->dmax());
    WeylSection<FormalScalar> resid = data->curvature_section() + covariant_d(rr, data->gamma_bar()) - delta(rr) +
                                      scaled_commutator(rr, rr).scaled(gr(1, 2)) - omega_sec;
    if (!resid.degree_below(data->dmax()).is_zero()) fail(r, "normalization residual nonzero");
    if (!delta_inv(rr).is_zero()) fail(r, "normalization is not delta-normalized");
    if (rr.degree_at_least(3) != rr) fail(r, "normalization has low-degree terms");

    for (int c = 0; c < 50; ++c) {
      Fun f = random_fun(rng, 2, order, 2, 3);
      if (sigma_symbol(data->q_extend(f)) != f) fail(r, "symbol section fails on function " + std::to_string(c));
    }
  });
}

// 7. Path-level behavior of the flux: additivity under splicing, vanishing on
// inner flows, and the primitive round trip.
inline CriterionResult criterion_flux_paths(unsigned long seed) {
  using namespace detail;
  return timed("flux morphism path properties", [&](CriterionResult &r) {
    int order = 3;
    std::mt19937 rng(static_cast<unsigned int>(seed) + 2);
    auto data = flat_data(order, {gr(1)});
    std::vector<std::vector<int>> windings = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {0, -1}};

    auto random_potential = [&]() {
      TorusFun<TimeFun> H(2, order);
      int cells = 2;
      for (int c = 0; c < cells; ++c) {
        Mode m = random_mode(rng, 2, 2);
        if (is_zero_mode(m)) m[0] = 1;
        FormalScalar amp = FormalScalar::monomial(order, static_cast<int>(pick(rng, 1, order - 1)), random_coeff(rng));
        int shape = static_cast<int>(pick(rng, 0, 2));
        TimeFun t = shape == 0   ? TimeFun::constant(amp)
                    : shape == 1 ? TimeFun::t_power(order, 1).scaled(amp)
                                 : TimeFun::phase(order, pick(rng, -1, 1), amp);
        H.add_coeff(m, t);
      }
      return H;
    };

    for (int c = 0; c < 10; ++c) {
      const std::vector<int> &v = windings[static_cast<size_t>(c) % windings.size()];
      AutPath a = heisenberg_flow(rotation_generator(data, v));
      PathGenerator b = (c % 2 == 0) ? rotation_generator(data, windings[static_cast<size_t>(c + 1) % windings.size()])
                                     : quasi_inner_path(data, random_potential());
      PathGenerator composite = compose_generators(a, b);
      H1Class want = h1_sum(flux_of_path(a.generator()), flux_of_path(b));
      if (flux_of_path(composite) != want) fail(r, "additivity fails on case " + std::to_string(c));
    }

    H1Class zero(2, FormalScalar(order));
    for (int c = 0; c < 10; ++c) {
      PathGenerator inner = quasi_inner_path(data, random_potential());
      if (flux_of_path(inner) != zero) fail(r, "inner path carries flux, case " + std::to_string(c));
    }

    Fun h0(2, order);
    h0.add_coeff({1, 0}, FormalScalar::monomial(order, 1, gr(1)));
    h0.add_coeff({-1, 0}, FormalScalar::monomial(order, 1, gr(1)));
    AutPath still = heisenberg_flow(quasi_inner_path(data, h0.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); })));
    PathGenerator detour = quasi_inner_path(data, random_potential());
    PathGenerator composite = compose_generators(still, detour);
    TorusFun<TimeFun> recovered = hamiltonianize(composite);
    PathGenerator replay = quasi_inner_path(data, recovered);
    std::vector<Mode> probes = {{1, 0}, {0, 1}, {1, 1}, {2, -1}, {3, 0}, {1, -3}, {2, 3}, {-3, -3}};
    for (const Mode &m : probes) {
      Fun e = Fun::basis_mode(2, order, m);
      if (flow_endpoint(flow_family(composite, e)) != flow_endpoint(flow_family(replay, e)))
        fail(r, "primitive round trip fails");
    }
  });
}

// 8. First-order extraction from the product matches the full lift through
// the linear order.
inline CriterionResult criterion_first_order() {
  using namespace detail;
  return timed("first order flux formula", [&](CriterionResult &r) {
    int order = 2;
    for (long c1 : {1L, 2L, 3L, -1L, 5L}) {
      auto data = flat_data(order, {gr(c1)});
      FedosovStar star(data);
      for (const std::vector<int> &v : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
        if (!h1_equal_through(flux_order1(star, v), flux_def_of_loop({data, v}), 1))
          fail(r, "mismatch at C1=" + std::to_string(c1));
      }
    }
  });
}

// 9. Transporting the product by a formal differential operator leaves the
// loop classes unchanged.
inline CriterionResult criterion_equivalence_invariance(int order) {
  using namespace detail;
  return timed("flux invariance under equivalence transports", [&](CriterionResult &r) {
    auto data = flat_data(order, {gr(2), gr(5)});
    EquivalenceOperator Ta(2, order);
    Ta.add_term(1, {2, 0}, Fun::constant(2, order, FormalScalar::constant(order, gr(1, 3))));
    EquivalenceOperator Tb(2, order);
    Tb.add_term(1, {1, 1}, Fun::constant(2, order, FormalScalar::constant(order, gr(-2))));
    for (const auto &T : {Ta, Tb})
      for (const std::vector<int> &v : {std::vector<int>{1, 0}, std::vector<int>{0, 1}})
        if (!check_flux_invariance(data, T, v)) fail(r, "transported loop class moved");
  });
}

// 10. The generator table separates different curvature data and is stable
// across reconstruction.
inline CriterionResult criterion_generator_table(int order) {
  using namespace detail;
  return timed("generator classes separate curvature data", [&](CriterionResult &r) {
    auto one = gamma_generators(flat_data(order, {gr(1)}));
    auto two = gamma_generators(flat_data(order, {gr(2)}));
    auto golden = gamma_generators(flat_data(order, {gr(1), gr(5)}));
    auto golden_again = gamma_generators(flat_data(order, {gr(1), gr(5)}));
    if (one == two) fail(r, "distinct data share a generator table");
    if (golden != golden_again) fail(r, "identical data disagree");
  });
}

// 11. Headroom stability: raising the fiber degree cap leaves everything
// unchanged, raising the truncation reproduces the lower orders.
inline CriterionResult criterion_stability(int order) {
  using namespace detail;
  return timed("stability under degree and order headroom", [&](CriterionResult &r) {
    for (const auto &[c1, c2] : std::vector<std::pair<long, long>>{{1, 0}, {2, 5}, {-1, 3}}) {
      auto base = flat_data(order, {gr(c1), gr(c2)});
      auto deeper = flat_data(order, {gr(c1), gr(c2)}, default_dmax(order) + 2);
      auto longer = flat_data(order + 1, {gr(c1), gr(c2)});
      for (const GoldenLoop &loop : golden_loops()) {
        H1Class want = flux_def_of_loop({base, loop.v});
        if (flux_def_of_loop({deeper, loop.v}) != want) fail(r, "degree headroom changed a flux");
        if (!h1_equal_through(flux_def_of_loop({longer, loop.v}), want, order)) fail(r, "order headroom changed a flux");
        if (flux_def_closed_form({deeper, loop.v}) != want) fail(r, "degree headroom broke the closed form");
        if (!h1_equal_through(flux_def_closed_form({longer, loop.v}), want, order)) fail(r, "order headroom broke the closed form");
      }
    }

    CriterionResult deeper_gate = criterion_oracle_gate(4, 2, default_dmax(4) + 2);
    if (!deeper_gate.pass) fail(r, "oracle gate at extra degree: " + deeper_gate.note);
    CriterionResult longer_gate = criterion_oracle_gate(5, 2);
    if (!longer_gate.pass) fail(r, "oracle gate at extra order: " + longer_gate.note);
  });
}

inline int run_acceptance_suite(std::ostream &out, int order = 3, unsigned long seed = kDefaultSeed) {
  if (order < 3) order = 3;
  std::vector<CriterionResult> results;
  results.push_back(criterion_golden_flux(order));
  results.push_back(criterion_closed_form(order));
  results.push_back(criterion_oracle_gate(4, 2));
  results.push_back(criterion_star_axioms());
  results.push_back(criterion_associativity(seed));
  results.push_back(criterion_internal_identities(seed));
  results.push_back(criterion_flux_paths(seed));
  results.push_back(criterion_first_order());
  results.push_back(criterion_equivalence_invariance(order));
  results.push_back(criterion_generator_table(order));
  results.push_back(criterion_stability(order));

  int failures = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const CriterionResult &r = results[i];
    if (!r.pass) ++failures;
    std::ostringstream line;
    line << (r.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << r.name;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << " (" << r.seconds << "s)";
    if (!r.note.empty()) line << " -- " << r.note;
    out << line.str() << "\n";
  }
  out << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures;
}

}  // namespace dqacc
