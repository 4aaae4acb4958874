#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/torus.hpp"

using namespace dq;

namespace {
using Fun = TorusFun<FormalScalar>;
using Form = TorusForm<FormalScalar>;

GaussianRational gr(long num, long den = 1) { return GaussianRational(make_rational(num, den)); }

Fun basis(int dim, int order, const Mode &m) { return Fun::basis_mode(dim, order, m); }
}  // namespace

TEST_CASE("mode pairing on blocks") {
  CHECK(mode_lambda({1, 0}, {0, 1}) == 1);
  CHECK(mode_lambda({0, 1}, {1, 0}) == -1);
  CHECK(mode_lambda({1, 0, 0, 0}, {0, 1, 0, 0}) == 1);
  CHECK(mode_lambda({1, 0, 0, 0}, {0, 0, 1, 0}) == 0);
  CHECK(mode_lambda({0, 0, 1, 0}, {0, 0, 0, 1}) == 1);
  CHECK(mode_lambda({2, 3}, {5, 7}) == 2 * 7 - 3 * 5);

  // Lambda is the inverse of omega.
  for (int i = 1; i <= 4; ++i)
    for (int k = 1; k <= 4; ++k) {
      int s = 0;
      for (int j = 1; j <= 4; ++j) s += lambda_entry(i, j) * omega_entry(j, k);
      CHECK(s == (i == k ? 1 : 0));
    }
}

TEST_CASE("trig polynomial arithmetic") {
  const int K = 2;
  Fun f = basis(2, K, {1, 0});
  Fun g = basis(2, K, {0, 1});
  Fun prod = f * g;
  CHECK(prod == basis(2, K, {1, 1}));
  CHECK((f + g) - g == f);
  CHECK((f - f).is_zero());
  CHECK(f.derivative(1) == f.scaled(GaussianRational::i_times(1)));
  CHECK(f.derivative(2).is_zero());
  CHECK(f.mode_radius() == 1);

  Fun other(4, K);
  CHECK_THROWS_AS(f + other, std::invalid_argument);
  Fun wrong_order(2, K + 1);
  CHECK_THROWS_AS(f + wrong_order, std::invalid_argument);
  CHECK_THROWS_AS(f.derivative(3), std::invalid_argument);
  CHECK_THROWS_AS(Fun(3, K), std::invalid_argument);
}

TEST_CASE("poisson bracket on modes") {
  const int K = 3;
  Fun em = basis(2, K, {1, 0});
  Fun en = basis(2, K, {0, 1});
  CHECK(poisson(em, en) == basis(2, K, {1, 1}));
  CHECK(poisson(en, em) == -basis(2, K, {1, 1}));

  // Bracket of modes is the pairing times the product mode, any dimension.
  Mode m = {2, -1, 0, 3};
  Mode n = {1, 1, -2, 0};
  Fun a = basis(4, K, m);
  Fun b = basis(4, K, n);
  CHECK(poisson(a, b) == basis(4, K, mode_sum(m, n)).scaled(gr(mode_lambda(m, n))));

  // Jacobi identity on a concrete triple.
  Mode p = {0, 1, 1, -1};
  Fun c = basis(4, K, p);
  Fun jac = poisson(a, poisson(b, c)) + poisson(b, poisson(c, a)) + poisson(c, poisson(a, b));
  CHECK(jac.is_zero());

  // Leibniz rule.
  CHECK(poisson(a, b * c) == poisson(a, b) * c + b * poisson(a, c));
}

TEST_CASE("hamiltonian fields") {
  const int K = 2;
  Fun f = basis(2, K, {1, 0});
  TorusField<FormalScalar> x = ham_field(f);
  CHECK(x.comp(1).is_zero());
  CHECK(x.comp(2) == f.scaled(GaussianRational::i_times(-1)));

  // X_F(G) agrees with the bracket.
  Fun g = basis(2, K, {2, -1});
  CHECK(field_apply(ham_field(f), g) == poisson(f, g));
  Fun a = basis(4, K, {1, 2, 0, -1});
  Fun b = basis(4, K, {0, 1, 1, 1});
  CHECK(field_apply(ham_field(a), b) == poisson(a, b));

  // Contraction against the standard symplectic form recovers dF.
  Form omega(4, K, 2);
  omega.set_comp({1, 2}, Fun::constant(4, K, FormalScalar::constant(K, gr(1))));
  omega.set_comp({3, 4}, Fun::constant(4, K, FormalScalar::constant(K, gr(1))));
  CHECK(contract_two_form(omega, ham_field(a)) == exterior_d(a));
}

TEST_CASE("exterior derivative and closedness") {
  const int K = 2;
  Fun f = basis(2, K, {1, 2});
  Form df = exterior_d(f);
  CHECK(df.comp({1}) == f.scaled(GaussianRational::i_times(1)));
  CHECK(df.comp({2}) == f.scaled(GaussianRational::i_times(2)));
  CHECK(is_closed(df));
  CHECK(exterior_d(df).is_zero());

  // d on a 1-form with the right orientation sign.
  Form w(2, K, 1);
  w.set_comp({2}, basis(2, K, {1, 0}));
  Form dw = exterior_d(w);
  CHECK(dw.comp({1, 2}) == basis(2, K, {1, 0}).scaled(GaussianRational::i_times(1)));
  CHECK(!is_closed(w));

  // d^2 = 0 in dimension 4 through 2-forms.
  Fun h = basis(4, K, {1, 0, -2, 1}) + basis(4, K, {0, 3, 1, 0});
  CHECK(exterior_d(exterior_d(h)).is_zero());

  Form mixed(4, K, 1);
  mixed.set_comp({2}, basis(4, K, {1, 1, 0, 0}));
  mixed.set_comp({4}, basis(4, K, {0, 0, 2, -1}));
  CHECK(exterior_d(exterior_d(mixed)).is_zero());
}

TEST_CASE("periods and primitives") {
  const int K = 2;
  // Constant 1-form: class is the coefficient vector.
  Form w = constant_one_form<FormalScalar>(2, K, {1, 2});
  std::vector<FormalScalar> cls = h1_class(w);
  CHECK(cls[0] == FormalScalar::constant(K, gr(1)));
  CHECK(cls[1] == FormalScalar::constant(K, gr(2)));
  CHECK_THROWS_AS(primitive(w), std::domain_error);

  // Exact form: primitive recovers the zero-mean potential.
  Fun f = basis(4, K, {1, -1, 2, 0}) + basis(4, K, {0, 0, 1, 1}).scaled(gr(3, 2));
  Fun back = primitive(exterior_d(f));
  CHECK(back == f);

  // Not closed at all.
  Form nc(2, K, 1);
  nc.set_comp({2}, basis(2, K, {1, 0}));
  CHECK_THROWS_AS(h1_class(nc), std::domain_error);
  CHECK_THROWS_AS(primitive(nc), std::domain_error);
}

TEST_CASE("loop pullback of modes") {
  const int K = 1;
  Fun f = basis(2, K, {1, 0}) + basis(2, K, {0, 1}).scaled(gr(2));
  TorusFun<TimeFun> pf = loop_pullback(f, {1, 0});
  CHECK(pf.coeff({1, 0}) == TimeFun::phase(K, 1, FormalScalar::constant(K, gr(1))));
  CHECK(pf.coeff({0, 1}) == TimeFun::constant(FormalScalar::constant(K, gr(2))));

  // Time derivative of the pullback equals the pullback of the directional
  // derivative along the winding vector.
  Fun g = basis(2, K, {2, -3});
  std::vector<int> v = {1, 2};
  TorusFun<TimeFun> lhs = loop_pullback(g, v).map_scalars([](const TimeFun &c) { return c.derivative(); });
  Fun dirg(2, K);
  for (int j = 1; j <= 2; ++j) dirg += g.derivative(j).scaled(gr(v[static_cast<size_t>(j - 1)]));
  CHECK(lhs == loop_pullback(dirg, v));
}
