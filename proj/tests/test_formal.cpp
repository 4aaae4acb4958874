#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/formal.hpp"
#include "dq/timefun.hpp"

using namespace dq;

namespace {
GaussianRational gr(long num, long den = 1) { return GaussianRational(make_rational(num, den)); }
GaussianRational gri(long re_num, long im_num, long den = 1) {
  return GaussianRational(make_rational(re_num, den), make_rational(im_num, den));
}
}  // namespace

TEST_CASE("gaussian rational field operations") {
  GaussianRational a = gri(1, 2);
  GaussianRational b = gri(3, -1);
  CHECK(a * b == gri(5, 5));
  CHECK(a + b == gri(4, 1));
  CHECK(a - b == gri(-2, 3));
  CHECK(GaussianRational::i_times(1).inverse() == gri(0, -1));
  CHECK(a * a.inverse() == gr(1));
  CHECK((a / b) * b == a);
  CHECK(a.conj() == gri(1, -2));
  CHECK(a.norm2() == make_rational(5));
  CHECK_THROWS_AS(GaussianRational().inverse(), std::domain_error);
  CHECK_THROWS_AS(make_rational(1, 0), std::domain_error);
  CHECK(make_rational(2, 4) == make_rational(1, 2));
  CHECK(make_rational(1, -2) == make_rational(-1, 2));
}

TEST_CASE("formal series arithmetic and truncation") {
  const int K = 3;
  FormalScalar nu = FormalScalar::monomial(K, 1, gr(1));
  FormalScalar a = FormalScalar::constant(K, gr(2)) + nu.scaled(gr(3));
  FormalScalar b = FormalScalar::constant(K, gr(1)) - nu;

  FormalScalar prod = a * b;
  CHECK(prod.coeff(0) == gr(2));
  CHECK(prod.coeff(1) == gr(1));
  CHECK(prod.coeff(2) == gr(-3));
  CHECK(prod.coeff(3) == gr(0));

  // Multiplication truncates: nu^3 * nu = 0 at order 3.
  FormalScalar nu3 = FormalScalar::monomial(K, 3, gr(5));
  CHECK((nu3 * nu).is_zero());

  CHECK(a.valuation() == 0);
  CHECK(nu3.valuation() == 3);
  CHECK(FormalScalar(K).valuation() == K + 1);

  CHECK(nu.nu_shifted(2) == FormalScalar::monomial(K, 3, gr(1)));
  CHECK(nu.nu_shifted(3).is_zero());
  CHECK(a.filtered([](int k) { return k >= 1; }) == nu.scaled(gr(3)));
  CHECK(a.truncated(1).order() == 1);

  FormalScalar other(K + 1);
  CHECK_THROWS_AS(a + other, std::invalid_argument);
  CHECK_THROWS_AS((void)a.coeff(K + 1), std::out_of_range);
  CHECK_THROWS_AS(a.truncated(K + 1), std::invalid_argument);
}

TEST_CASE("series exp and inverse") {
  const int K = 4;
  FormalScalar x = FormalScalar::monomial(K, 1, gr(2)) + FormalScalar::monomial(K, 2, gri(0, 1));

  FormalScalar e = series_exp(x);
  CHECK(e.coeff(0) == gr(1));
  CHECK(e * series_exp(-x) == FormalScalar::constant(K, gr(1)));

  FormalScalar u = FormalScalar::constant(K, gr(3)) + x;
  CHECK(u * series_inverse(u) == FormalScalar::constant(K, gr(1)));

  CHECK_THROWS_AS(series_exp(u), std::domain_error);
  CHECK_THROWS_AS(series_inverse(x), std::domain_error);
}

TEST_CASE("time ring products and phases") {
  const int K = 2;
  TimeFun e2 = TimeFun::phase(K, 2, FormalScalar::constant(K, gr(1)));
  TimeFun e3 = TimeFun::phase(K, 3, FormalScalar::constant(K, gr(1)));
  TimeFun e5 = TimeFun::phase(K, 5, FormalScalar::constant(K, gr(1)));
  CHECK(e2 * e3 == e5);

  TimeFun t = TimeFun::t_power(K, 1);
  TimeFun em1 = TimeFun::phase(K, -1, FormalScalar::constant(K, gr(1)));
  TimeFun e1 = TimeFun::phase(K, 1, FormalScalar::constant(K, gr(1)));
  CHECK((t * e1) * (t * em1) == TimeFun::t_power(K, 2));
  CHECK(e1 * em1 == TimeFun::constant(FormalScalar::constant(K, gr(1))));

  TimeFun mismatch(K + 1);
  CHECK_THROWS_AS(t + mismatch, std::invalid_argument);
}

TEST_CASE("loop derivative and running integral invert each other") {
  const int K = 2;
  TimeFun f = TimeFun::phase(K, 3, FormalScalar::constant(K, gri(1, 2))) +
              TimeFun::t_power(K, 2) * TimeFun::phase(K, -1, FormalScalar::constant(K, gr(5))) +
              TimeFun::t_power(K, 1).scaled(gr(7)) + TimeFun::constant(FormalScalar::monomial(K, 1, gr(1)));

  TimeFun g = f.integral_from_zero();
  CHECK(g.derivative() == f);
  CHECK(g.eval_unit(false).is_zero());

  // Derivative of a running integral of a derivative closes the loop.
  CHECK(f.derivative().integral_from_zero() == f - TimeFun::constant(f.eval_unit(false)));
}

TEST_CASE("full period integrals") {
  const int K = 1;
  // Pure phases average out; polynomials integrate classically.
  for (long k : {-3L, -1L, 1L, 2L}) {
    TimeFun ek = TimeFun::phase(K, k, FormalScalar::constant(K, gr(1)));
    CHECK(ek.integral_01().is_zero());
  }
  for (int j : {0, 1, 2, 3}) {
    TimeFun tj = TimeFun::t_power(K, j);
    CHECK(tj.integral_01() == FormalScalar::constant(K, gr(1, j + 1)));
  }

  // Mixed term, checked by hand against the defining relation d(E_k) = i k E_k:
  // the antiderivative of t*E_1 is (1 - i t) E_1, so the period integral is -i.
  TimeFun te1 = TimeFun::t_power(K, 1) * TimeFun::phase(K, 1, FormalScalar::constant(K, gr(1)));
  CHECK(te1.integral_01() == FormalScalar::constant(K, gri(0, -1)));

  // Parts: integral of d(t^2 E_2) over the period telescopes to e(1) - e(0) = 0.
  TimeFun h = TimeFun::t_power(K, 2) * TimeFun::phase(K, 2, FormalScalar::constant(K, gr(1)));
  CHECK(h.derivative().integral_01() == h.eval_unit(true) - h.eval_unit(false));
}
