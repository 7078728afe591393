#include <gtest/gtest.h>

#include "opcalc/errors.hpp"
#include "opcalc/parse.hpp"

using namespace opcalc;

namespace {

void expect_same(const HolFunction& f, const HolFunction& g) {
  for (cplx z : {cplx(0.5, 0.0), cplx(1.0, 2.0), cplx(3.0, -0.7), cplx(10.0, 5.0)}) {
    EXPECT_LE(std::abs(f.eval(z) - g.eval(z)), 1e-13 * (1.0 + std::abs(g.eval(z)))) << f.describe() << " at " << z;
  }
}

}  // namespace

TEST(ParseComplex, Literals) {
  EXPECT_EQ(parse_complex("2"), cplx(2.0));
  EXPECT_EQ(parse_complex("-0.3"), cplx(-0.3));
  EXPECT_EQ(parse_complex("1+0i"), cplx(1.0, 0.0));
  EXPECT_EQ(parse_complex("-2.5e-1-3i"), cplx(-0.25, -3.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
  EXPECT_EQ(parse_complex("1-i"), cplx(1.0, -1.0));
  EXPECT_EQ(parse_complex("-2i"), cplx(0.0, -2.0));
  EXPECT_EQ(parse_complex(" (1e2+2i) "), cplx(100.0, 2.0));
  for (const char* bad : {"", "x", "1+", "1+2", "1i2", "1+2j", "--1"}) EXPECT_THROW(parse_complex(bad), ParseError) << bad;
}

TEST(ParseFunction, CatalogExamples) {
  expect_same(parse_function("exp(t=2)"), HolFunction::exp(2.0));
  expect_same(parse_function("resolvent(1+0i)"), HolFunction::resolvent(1.0));
  expect_same(parse_function("cayley^12"), HolFunction::cayley_power(12));
  EXPECT_EQ(parse_function("cayley^12").kind(), FnKind::CayleyPower);
  expect_same(parse_function("phi(t=100)"), HolFunction::phi(100.0));
  expect_same(parse_function("power_exp(nu=1)"), HolFunction::power_exp(1.0));
  expect_same(parse_function("bernstein_resolvent(g=sqrt,lambda=1+0i)"),
              HolFunction::bernstein_resolvent(BernsteinFunction::sqrt(), 1.0));
  expect_same(parse_function("bandlimited[(0.5,1),(2,-0.3)]"), HolFunction::band_limited({{0.5, 1.0}, {2.0, -0.3}}));
  expect_same(parse_function("arccot"), HolFunction::arccot());
  expect_same(parse_function("exp_arccot"), HolFunction::exp_arccot());
  expect_same(parse_function("e_delta(delta=0.5)"), HolFunction::e_delta(0.5));
  expect_same(parse_function("sector_exp(1.5, 2)"), HolFunction::sector_exp(1.5, 2.0));
  expect_same(parse_function("bernstein_resolvent(g=power(0.7),lambda=1)"),
              HolFunction::bernstein_resolvent(BernsteinFunction::power(0.7), 1.0));
}

TEST(ParseFunction, Expressions) {
  const HolFunction e1 = HolFunction::exp(1.0), e2 = HolFunction::exp(2.0), r1 = HolFunction::resolvent(1.0);
  expect_same(parse_function("exp(t=1) + 0.5*exp(t=2)"), e1 + cplx(0.5) * e2);
  expect_same(parse_function("exp(1) - resolvent(1)"), e1 - r1);
  expect_same(parse_function("-resolvent(1) * (exp(1) + 2i)"), cplx(-1.0) * r1 * (e1 + HolFunction::constant(cplx(0, 2))));
  expect_same(parse_function("resolvent(1)^3"), r1 * r1 * r1);
  expect_same(parse_function("cayley^2^3"), HolFunction::cayley_power(6));
  expect_same(parse_function("laplace(dirac(0) - 2*expdec(1))"), HolFunction::cayley_power(1));
  expect_same(parse_function("arg_invert(exp(1))"), arg_invert(e1));
  expect_same(parse_function("scale(resolvent(1), t=2)"), arg_scale(r1, 2.0));
  expect_same(parse_function("shift(exp(1), tau=1+1i)"), arg_shift(e1, cplx(1.0, 1.0)));
  expect_same(parse_function("d(resolvent(1))"), HolFunction::derivative_of(r1));
  EXPECT_EQ(parse_function("1+2i").kind(), FnKind::Constant);
  EXPECT_EQ(parse_function("resolvent(1, psi=2.5)").domain().half_angle, 2.5);
}

TEST(ParseFunction, DescribeRoundTrip) {
  const std::vector<HolFunction> fs{
      HolFunction::exp(2.0), HolFunction::resolvent(cplx(1.0, -2.0)), HolFunction::cayley_power(5),
      HolFunction::phi(3.0), HolFunction::power_exp(1.5), HolFunction::arccot(), HolFunction::exp_arccot(),
      HolFunction::sector_exp(1.5, cplx(1.0, 0.5)), HolFunction::bernstein_resolvent(BernsteinFunction::log1p(), 2.0),
      HolFunction::band_limited({{0.5, cplx(1.0, 1.0)}, {2.0, -0.3}}), HolFunction::e_delta(0.25),
      HolFunction::constant(cplx(2.0, -1.0)), HolFunction::exp(1.0) - cplx(0.5) * HolFunction::resolvent(3.0),
      arg_scale(HolFunction::cayley_power(2), 3.0), arg_shift(HolFunction::exp(1.0), 2.0),
      compose_power(HolFunction::exp(1.0), 0.5), arg_invert(HolFunction::resolvent(1.0)),
      HolFunction::derivative_of(HolFunction::phi(1.0))};
  for (const auto& f : fs) expect_same(parse_function(f.describe()), f);
}

TEST(ParseFunction, Errors) {
  for (const char* bad : {"", "exp(", "exp()", "exp(t=1", "foo(1)", "exp(s=1)", "exp(1,2)", "cayley^-1", "cayley^1.5",
                          "resolvent(1) +", "bandlimited[(1)]", "bandlimited[]", "exp(t=1+1i)", "exp(t=1) 2",
                          "bernstein_resolvent(g=cos,lambda=1)", "phi"}) {
    EXPECT_THROW(parse_function(bad), Error) << bad;
  }
  EXPECT_THROW(parse_function("exp(t=-1)"), DomainError);
}

TEST(ParseMeasure, Forms) {
  const RadonMeasure mu = parse_measure("dirac(0) - 2*expdec(1)");
  ASSERT_EQ(mu.atoms().size(), 1u);
  EXPECT_NEAR(hp_norm(mu), 3.0, 1e-12);
  const RadonMeasure nu = parse_measure("expdec(1) * expdec(1)");
  const HolFunction f = laplace_transform(nu);
  EXPECT_NEAR(std::abs(f.eval(1.0) - 0.25), 0.0, 1e-12);
  EXPECT_NEAR(hp_norm(parse_measure("cayley(4)")), hp_norm(cayley_power_measure(4)), 1e-12);
  EXPECT_NEAR(std::abs(parse_measure("polyexp(2, 1, c=0.5)").density(1.0) - 0.5 * std::exp(-1.0)), 0.0, 1e-15);
  for (const char* bad : {"2", "dirac(0) + 1", "foo(1)", "dirac()", "2^2"}) EXPECT_THROW(parse_measure(bad), Error) << bad;
}

TEST(ParseOperator, Forms) {
  const MatrixOperator d = parse_operator("diag(1, 2, 3+1i)");
  EXPECT_EQ(d.dim(), 3);
  EXPECT_EQ(d.entries()(2, 2), cplx(3.0, 1.0));
  const MatrixOperator j = parse_operator("jordan(lambda=1, n=3)");
  EXPECT_FALSE(j.diagonalizable());
  const MatrixOperator r = parse_operator("random_hilbert_contraction_gen(6, seed=7)");
  EXPECT_EQ(r.dim(), 6);
  EXPECT_EQ(r.entries(), random_hilbert_contraction_gen(6, 7).entries());
  EXPECT_EQ(parse_operator("random_sectorial(4, theta=1, seed=3)").entries(), random_sectorial(4, 1.0, 3).entries());
  const MatrixOperator m = parse_operator("[[1, 0], [[0, 1], 2]]");
  EXPECT_EQ(m.entries()(1, 0), cplx(0.0, 1.0));
  for (const char* bad : {"", "diag()", "jordan(1)", "random_sectorial(0, 1, 1)", "random_sectorial(4, 1, seed=-1)",
                          "[[1,2]]", "foo(1)", "[1,"}) {
    EXPECT_THROW(parse_operator(bad), Error) << bad;
  }
}
