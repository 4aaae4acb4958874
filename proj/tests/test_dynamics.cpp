#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/dynamics.hpp"

using namespace dq;

namespace {

GaussianRational gr(long num, long den = 1) { return GaussianRational(make_rational(num, den)); }

Fun fun_of(int dim, int order, const std::vector<std::pair<Mode, GaussianRational>> &modes) {
  Fun f(dim, order);
  for (const auto &[m, c] : modes) f.add_coeff(m, FormalScalar::constant(order, c));
  return f;
}

std::shared_ptr<FedosovData> flat_data(int order, const std::vector<GaussianRational> &coeffs) {
  return make_fedosov_data(ConnectionData::flat(2, order), block_curvature_form(2, order, coeffs));
}

std::shared_ptr<FedosovData> curved_data(int order) {
  ConnectionData cd(2, order);
  cd.set_lowered(1, 1, 1, Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  cd.set_lowered(2, 2, 2, Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  std::vector<GaussianRational> coeffs(static_cast<size_t>(order), gr(0));
  coeffs[0] = gr(1);
  return make_fedosov_data(cd, block_curvature_form(2, order, coeffs));
}

// (1/nu)[F, G] for the ambient product, exact at every stored order.
Fun scaled_star_bracket(const FedosovData &data, const Fun &F, const Fun &G) {
  return sigma_symbol(scaled_commutator(data.q_extend(F), data.q_extend(G)));
}

std::vector<Fun> probe_funs(int order) {
  return {
      Fun::basis_mode(2, order, {1, 0}),
      Fun::basis_mode(2, order, {0, 1}),
      Fun::basis_mode(2, order, {1, -2}),
      fun_of(2, order, {{{0, 0}, gr(3)}, {{2, 1}, gr(1, 2)}}),
  };
}

}  // namespace

TEST_CASE("derivation tails measure the flat extension against the identity") {
  int order = 2;
  for (auto data : {flat_data(order, {gr(1), gr(0)}), curved_data(order)}) {
    for (const Fun &F : probe_funs(order)) {
      WSec w = data->q_tail(exterior_d(F));
      WSec expected = data->q_extend(F) - section_of_fun(F, data->dmax());
      CHECK(w == expected);
    }
  }
}

TEST_CASE("quasi-inner derivations act by the scaled commutator with the potential") {
  int order = 3;
  auto data = flat_data(order, {gr(2), gr(-1), gr(0)});
  Fun H = fun_of(2, order, {{{1, 1}, gr(1)}, {{-1, -1}, gr(1)}});
  Derivation d = quasi_inner_derivation(data, H);
  CHECK(d.is_quasi_inner());
  CHECK(d.hamiltonian() == H);
  for (const Fun &F : probe_funs(order)) CHECK(d.apply(F) == scaled_star_bracket(*data, H, F));
}

TEST_CASE("derivation brackets close with the expected quasi-inner potential") {
  int order = 3;
  auto data = curved_data(order);
  Fun F = fun_of(2, order, {{{1, 0}, gr(1)}, {{-1, 0}, gr(1)}});
  Fun G = fun_of(2, order, {{{0, 1}, gr(1)}, {{0, -1}, gr(1)}});
  Derivation a = quasi_inner_derivation(data, F);
  Derivation b = quasi_inner_derivation(data, G);
  Derivation c = commutator_derivation(a, b);
  Fun H = scaled_star_bracket(*data, F, G);
  CHECK(c.one_form() == exterior_d(H));
  for (const Fun &e : probe_funs(order)) CHECK(c.apply(e) == a.apply(b.apply(e)) - b.apply(a.apply(e)));
}

TEST_CASE("brackets of closed derivations are quasi-inner") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  Form beta1 = constant_one_form<FormalScalar>(2, order, {0, 1});
  Form beta2 = constant_one_form<FormalScalar>(2, order, {3, 0}) + exterior_d(Fun::basis_mode(2, order, {1, 1}));
  Derivation a(data, beta1);
  Derivation b(data, beta2);
  CHECK(!a.is_quasi_inner());
  Derivation c = commutator_derivation(a, b);
  CHECK(c.is_quasi_inner());
  for (const Fun &e : probe_funs(order)) CHECK(c.apply(e) == a.apply(b.apply(e)) - b.apply(a.apply(e)));
}

TEST_CASE("path generators classify their classical part") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});

  PathGenerator rot = rotation_generator(data, {1, 0});
  CHECK(rot.winding() == std::vector<int>{1, 0});
  CHECK(rot.classical_form().comp({2}) == Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  CHECK(rot.classical_form().comp({1}).is_zero());
  CHECK(rot.plus_part().is_zero());

  PathGenerator rot2 = rotation_generator(data, {0, 1});
  CHECK(rot2.classical_form().comp({1}) == Fun::constant(2, order, FormalScalar::constant(order, gr(-1))));

  TorusFun<TimeFun> H(2, order);
  H.set_coeff({1, 0}, TimeFun::t_power(order, 1).scaled(FormalScalar::monomial(order, 1, gr(1))));
  PathGenerator exact = quasi_inner_path(data, H);
  CHECK(exact.is_still());
  CHECK(exact.classical_form().comp({1}).is_zero());

  TorusForm<TimeFun> half(2, order, 1);
  half.set_comp({2}, TorusFun<TimeFun>::constant(2, order, TimeFun::constant(FormalScalar::constant(order, gr(1, 2)))));
  CHECK_THROWS_WITH_AS(PathGenerator(data, half), "unsupported path generator", std::domain_error);

  TorusForm<TimeFun> varying(2, order, 1);
  varying.set_comp({2}, TorusFun<TimeFun>::constant(2, order, TimeFun::t_power(order, 1)));
  CHECK_THROWS_WITH_AS(PathGenerator(data, varying), "unsupported path generator", std::domain_error);

  TorusForm<TimeFun> wavy(2, order, 1);
  wavy.set_comp({1}, TorusFun<TimeFun>::mode(2, order, {1, 0}, TimeFun::constant(FormalScalar::constant(order, gr(1)))));
  CHECK_THROWS_WITH_AS(PathGenerator(data, wavy), "unsupported path generator", std::domain_error);

  TorusForm<TimeFun> open(2, order, 1);
  open.set_comp({1}, TorusFun<TimeFun>::mode(2, order, {0, 1}, TimeFun::constant(FormalScalar::monomial(order, 1, gr(1)))));
  CHECK_THROWS_WITH_AS(PathGenerator(data, open), "form is not closed", std::domain_error);
}

TEST_CASE("the zero generator flows to the identity") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  PathGenerator gen(data, TorusForm<TimeFun>(2, order, 1));
  AutPath path = heisenberg_flow(gen);
  CHECK(path.has_closed_form());
  CHECK(path.endpoint() == Automorphism::identity(data));
  for (const Fun &e : probe_funs(order)) CHECK(path.endpoint().apply(e) == e);
}

TEST_CASE("rotation flows over invariant moyal data are pure substitution phases") {
  int order = 2;
  auto data = flat_data(order, {gr(0), gr(0)});
  PathGenerator gen = rotation_generator(data, {1, 0});
  for (const Fun &e : probe_funs(order)) {
    TorusFun<TimeFun> fam = flow_family(gen, e);
    CHECK(fam == loop_pullback(e, {1, 0}, 1));
  }
}

TEST_CASE("classical parts of rotation flows are substitution phases") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  PathGenerator gen = rotation_generator(data, {1, 2});
  Fun e = Fun::basis_mode(2, order, {1, -1});
  TorusFun<TimeFun> fam = flow_family(gen, e);
  TorusFun<TimeFun> classical = fam.nu_filtered([](int k) { return k == 0; });
  CHECK(classical == loop_pullback(e, {1, 2}, 1));
}

TEST_CASE("the rotation flow exponent matches the hand-solved fixed point") {
  int order = 3;
  std::vector<GaussianRational> coeffs = {gr(1), gr(-2), gr(0)};
  auto data = flat_data(order, coeffs);
  AutPath path = heisenberg_flow(rotation_generator(data, {1, 0}));
  CHECK(path.has_closed_form());
  CHECK(path.endpoint().winding() == std::vector<int>{1, 0});

  // gamma = c + gamma^2/4 with c the central curvature coefficient; the
  // exponent is (gamma/2)(alpha + 1) y^2 with alpha = (1 - gamma/2)^{-1}.
  FormalScalar c = FormalScalar::monomial(order, 1, coeffs[0]) + FormalScalar::monomial(order, 2, coeffs[1]);
  FormalScalar gamma = FormalScalar(order);
  for (int sweep = 0; sweep <= order + 1; ++sweep) gamma = c + (gamma * gamma).scaled(gr(1, 4));
  FormalScalar alpha = series_inverse(FormalScalar::constant(order, gr(1)) - gamma.scaled(gr(1, 2)));
  FormalScalar coefficient = gamma.scaled(gr(1, 2)) * (alpha + FormalScalar::constant(order, gr(1)));

  WSec expected(2, order, data->dmax(), 0);
  expected.add_cell({0, 1}, {}, Fun::constant(2, order, coefficient));
  CHECK(path.endpoint().exponent() == expected);

  // The flat differential of the exponent is exactly -c dtheta_2.
  TorusForm<FormalScalar> du = base_form_part(data->flat_d(path.endpoint().exponent()));
  CHECK(du.comp({1}).is_zero());
  CHECK(du.comp({2}) == Fun::constant(2, order, -c));
}

TEST_CASE("closed-form and recursive flows agree beyond the built-in certificate") {
  int order = 3;
  for (auto data : {flat_data(order, {gr(1), gr(-2), gr(0)}), curved_data(order)}) {
    for (const std::vector<int> &v : {std::vector<int>{1, 0}, std::vector<int>{0, 1}, std::vector<int>{1, -1}}) {
      AutPath path = heisenberg_flow(rotation_generator(data, v));
      CHECK(path.has_closed_form());
      for (const Fun &e : probe_funs(order))
        CHECK(path.endpoint().apply(e) == flow_endpoint(flow_family(path.generator(), e)));
    }
  }
}

TEST_CASE("still autonomous flows match the operator exponential") {
  int order = 3;
  auto data = flat_data(order, {gr(1), gr(0), gr(0)});
  Fun H = fun_of(2, order, {{{1, 1}, gr(1)}, {{-1, -1}, gr(1)}, {{2, -1}, gr(1, 3)}});
  Fun Hnu = H.scaled_formal(FormalScalar::monomial(order, 1, gr(1)));
  TorusFun<TimeFun> Ht = Hnu.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); });
  AutPath path = heisenberg_flow(quasi_inner_path(data, Ht));
  CHECK(path.endpoint().winding() == std::vector<int>{0, 0});

  Derivation d = quasi_inner_derivation(data, Hnu);
  for (const Fun &e : probe_funs(order)) {
    Fun sum = e;
    Fun term = e;
    mpq_class factorial(1);
    for (int k = 1; k <= order + 1; ++k) {
      term = d.apply(term);
      factorial *= k;
      sum += term.scaled(GaussianRational(mpq_class(1) / factorial));
    }
    CHECK(path.endpoint().apply(e) == sum);
  }
}

TEST_CASE("non-commuting time dependence falls back to the recursion") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  TorusFun<TimeFun> H(2, order);
  H.set_coeff({1, 0}, TimeFun::t_power(order, 1).scaled(FormalScalar::monomial(order, 1, gr(1))));
  H.set_coeff({0, 1}, TimeFun::t_power(order, 2).scaled(FormalScalar::monomial(order, 1, gr(1))));
  PathGenerator gen = quasi_inner_path(data, H);
  AutPath path = heisenberg_flow(gen);
  CHECK(!path.has_closed_form());
  CHECK_THROWS_WITH_AS(path.exponent_family(), "no closed-form exponent available", std::domain_error);
  for (const Fun &e : {Fun::basis_mode(2, order, {1, 1}), Fun::basis_mode(2, order, {2, 0})})
    CHECK(path.endpoint().apply(e) == flow_endpoint(flow_family(gen, e)));
}

TEST_CASE("mode-carrying curvature falls back to the recursion") {
  int order = 2;
  TorusForm<FormalScalar> curv(2, order, 2);
  Fun ripple = fun_of(2, order, {{{0, 1}, gr(1)}, {{0, -1}, gr(1)}});
  curv.set_comp({1, 2}, ripple.scaled_formal(FormalScalar::monomial(order, 1, gr(1))));
  auto data = make_fedosov_data(ConnectionData::flat(2, order), curv);
  CHECK(!data->is_translation_invariant());
  PathGenerator gen = rotation_generator(data, {1, 0});
  AutPath path = heisenberg_flow(gen);
  CHECK(!path.has_closed_form());
  for (const Fun &e : probe_funs(order))
    CHECK(path.endpoint().apply(e) == flow_endpoint(flow_family(gen, e)));
}

TEST_CASE("flow endpoints compose and invert as a group") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  Automorphism a = heisenberg_flow(rotation_generator(data, {1, 0})).endpoint();
  Automorphism b = heisenberg_flow(rotation_generator(data, {0, 1})).endpoint();
  Fun Hnu = fun_of(2, order, {{{1, 1}, gr(1)}, {{-1, -1}, gr(1)}}).scaled_formal(FormalScalar::monomial(order, 1, gr(1)));
  Automorphism h = heisenberg_flow(quasi_inner_path(data, Hnu.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); }))).endpoint();

  Automorphism ab = compose(a, b);
  CHECK(ab.winding() == std::vector<int>{1, 1});
  Fun e = Fun::basis_mode(2, order, {2, -1});
  CHECK(ab.apply(e) == a.apply(b.apply(e)));

  CHECK(compose(a, invert(a)) == Automorphism::identity(data));
  CHECK(compose(compose(a, b), h) == compose(a, compose(b, h)));
  CHECK(log_vertical(a) == a.exponent());
  CHECK(log_vertical(ab) == ab.exponent());
}

TEST_CASE("flow endpoints respect the deformed product") {
  int order = 3;
  auto data = flat_data(order, {gr(1), gr(-2), gr(0)});
  Automorphism a = heisenberg_flow(rotation_generator(data, {1, 0})).endpoint();
  Fun F = fun_of(2, order, {{{1, 0}, gr(1)}, {{0, -1}, gr(2)}});
  Fun G = fun_of(2, order, {{{0, 1}, gr(1)}, {{1, 1}, gr(1, 2)}});
  CHECK(a.apply(data->star(F, G)) == data->star(a.apply(F), a.apply(G)));
}

TEST_CASE("conjugated inner derivations transform their potentials") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  Automorphism a = heisenberg_flow(rotation_generator(data, {1, 0})).endpoint();
  Automorphism ai = invert(a);
  Fun G = fun_of(2, order, {{{1, 1}, gr(1)}, {{-1, 2}, gr(1, 2)}});
  Derivation d = quasi_inner_derivation(data, G);
  Derivation conj = quasi_inner_derivation(data, a.apply(G));
  for (const Fun &e : probe_funs(order)) CHECK(a.apply(d.apply(ai.apply(e))) == conj.apply(e));
}

TEST_CASE("composite generators splice flows") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  AutPath left = heisenberg_flow(rotation_generator(data, {1, 0}));
  PathGenerator right = rotation_generator(data, {0, 1});
  PathGenerator both = compose_generators(left, right);
  CHECK(both.winding() == std::vector<int>{1, 1});
  Automorphism expected = compose(left.endpoint(), heisenberg_flow(right).endpoint());
  Automorphism spliced = heisenberg_flow(both).endpoint();
  for (const Fun &e : probe_funs(order)) CHECK(spliced.apply(e) == expected.apply(e));
}

TEST_CASE("splicing a still exact path keeps the winding and endpoint") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  AutPath left = heisenberg_flow(rotation_generator(data, {1, 0}));
  TorusFun<TimeFun> H(2, order);
  H.set_coeff({1, 1}, TimeFun::t_power(order, 1).scaled(FormalScalar::monomial(order, 1, gr(1))));
  H.set_coeff({-1, -1}, TimeFun::t_power(order, 1).scaled(FormalScalar::monomial(order, 1, gr(1))));
  PathGenerator right = quasi_inner_path(data, H);
  PathGenerator both = compose_generators(left, right);
  CHECK(both.winding() == std::vector<int>{1, 0});
  Automorphism expected = compose(left.endpoint(), heisenberg_flow(right).endpoint());
  Automorphism spliced = heisenberg_flow(both).endpoint();
  for (const Fun &e : probe_funs(order)) CHECK(spliced.apply(e) == expected.apply(e));
}

TEST_CASE("hamiltonianize recovers zero-mean potentials and rejects winding paths") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  TorusFun<TimeFun> H(2, order);
  H.set_coeff({1, 0}, TimeFun::t_power(order, 1).scaled(FormalScalar::monomial(order, 1, gr(1))));
  H.set_coeff({0, 1}, TimeFun::constant(FormalScalar::monomial(order, 1, gr(2))));
  PathGenerator gen = quasi_inner_path(data, H);
  CHECK(hamiltonianize(gen) == H);
  CHECK(quasi_inner_path(data, hamiltonianize(gen)).one_form() == gen.one_form());

  CHECK_THROWS_WITH_AS(hamiltonianize(rotation_generator(data, {0, 1})), "path not flux-exact", std::domain_error);

  // A harmonic phase has zero net integral but a nonzero running integral,
  // so it is not the differential of any potential family.
  TorusForm<TimeFun> pulse(2, order, 1);
  pulse.set_comp({1}, TorusFun<TimeFun>::constant(2, order, TimeFun::phase(order, 1, FormalScalar::monomial(order, 1, gr(1)))));
  CHECK_THROWS_WITH_AS(hamiltonianize(PathGenerator(data, pulse)), "path not flux-exact", std::domain_error);
}

TEST_CASE("doubling an autonomous generator squares the endpoint") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  Fun Hnu = fun_of(2, order, {{{1, 1}, gr(1)}, {{-1, -1}, gr(1)}}).scaled_formal(FormalScalar::monomial(order, 1, gr(1)));
  TorusFun<TimeFun> Ht = Hnu.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); });
  Automorphism once = heisenberg_flow(quasi_inner_path(data, Ht)).endpoint();
  Automorphism twice = heisenberg_flow(quasi_inner_path(data, Ht.scaled(gr(2)))).endpoint();
  CHECK(twice == compose(once, once));
}

TEST_CASE("automorphism exponents must be vertical") {
  int order = 2;
  auto data = flat_data(order, {gr(1), gr(0)});
  WSec shear(2, order, data->dmax(), 0);
  shear.add_cell({1, 1}, {}, Fun::constant(2, order, FormalScalar::constant(order, gr(1))));
  CHECK_THROWS_WITH_AS(Automorphism(data, {0, 0}, shear), "automorphism exponent has low-degree terms", std::invalid_argument);
}
