#include <gtest/gtest.h>

#include "fnreps/eval.hpp"
#include "oracle.hpp"

using namespace fnreps;

namespace {

TEST(Parse, Structure) {
  EXPECT_EQ(structure(parse("sin(10*x)+cos(20*x)")), "Add(Sin(Mul(10,x)),Cos(Mul(20,x)))");
  EXPECT_EQ(structure(parse("x")), "x");
  EXPECT_EQ(structure(parse(" 1 ")), "1");
  EXPECT_EQ(structure(parse("x^3")), "Mul(Mul(x,x),x)");
  EXPECT_EQ(structure(parse("x^0")), "1");
  EXPECT_EQ(structure(parse("max(x, -x)")), "Max2(x,Neg(x))");
  EXPECT_EQ(structure(parse("1-2*x/3")), "Sub(1,Div(Mul(2,x),3))");
  EXPECT_EQ(structure(parse("7*pi*x")), "Mul(Mul(7,pi),x)");
}

TEST(Parse, Literals) {
  Expr half = parse("0.5");
  ASSERT_TRUE(half->lit.has_value());
  EXPECT_EQ(*half->lit, Dyadic(mpz_class(1), -1));
  Expr tenth = parse("0.1");
  EXPECT_FALSE(tenth->lit.has_value());
  ASSERT_TRUE(tenth->real.has_value());
  EXPECT_TRUE(oracle::contains(tenth->real->query(60), oracle::Mp(mpq_class(1, 10))));
}

TEST(Parse, ErrorsCarryPosition) {
  for (const char* bad : {"", "sin(x", "x +", "max(x)", "x^", "y", "1..2", "x)"}) {
    try {
      parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ParseError) << bad;
      EXPECT_NE(std::string(e.what()).find("position"), std::string::npos) << bad;
    }
  }
}

TEST(Parse, SharedSubtreesEvaluateOnce) {
  Expr s = ex::sin(ex::x());
  Expr e = ex::add(s, s);
  struct Counting : alg::BFunAlg {
    int sins = 0;
    Value sin(const Value& a) {
      ++sins;
      return alg::BFunAlg::sin(a);
    }
  } a;
  eval_with(e, a);
  EXPECT_EQ(a.sins, 1);
}

TEST(Eval, TrivialAcrossStrategies) {
  for (Strategy s : kAllStrategies) {
    SCOPED_TRACE(strategy_name(s));
    EXPECT_TRUE(oracle::contains(eval_integral(parse("1"), s).query(10), oracle::Mp(2.0)));
    EXPECT_TRUE(oracle::contains(eval_max(parse("x"), s).query(10), oracle::Mp(1.0)));
    EXPECT_TRUE(oracle::contains(eval_integral(parse("x*x"), s).query(8), oracle::Mp(mpq_class(2, 3))));
  }
}

TEST(Eval, ClosedFormIntegral) {
  // ∫_{-1}^{1} sin(10x) + cos(20x) dx = sin(20)/10.
  Expr e = parse("sin(10*x)+cos(20*x)");
  oracle::Mp truth = oracle::sin(oracle::Mp(20.0)) / oracle::Mp(10.0);
  for (Strategy s : {Strategy::Poly, Strategy::PPoly, Strategy::LPoly, Strategy::LPPoly, Strategy::Frac}) {
    SCOPED_TRACE(strategy_name(s));
    Ball b = eval_integral(e, s).query(20);
    EXPECT_TRUE(oracle::contains(b, truth));
    EXPECT_LE(b.radius(), Dyadic::pow2(-20));
  }
  Ball b = eval_integral(e, Strategy::DBFun).query(5);
  EXPECT_TRUE(oracle::contains(b, truth));
}

TEST(Eval, MaxAgreesAcrossStrategies) {
  Expr e = parse("max(sin(10*x), cos(11*x))");
  // sin(10x) reaches 1 inside [-1,1], so the maximum is 1. A single polynomial for max needs
  // degree exponential in the accuracy, which the default degree cap refuses.
  for (Strategy s : {Strategy::BFun, Strategy::DBFun, Strategy::PPoly, Strategy::LPPoly, Strategy::Poly,
                     Strategy::LPoly}) {
    SCOPED_TRACE(strategy_name(s));
    BudgetScope scope(Budget{});
    try {
      EXPECT_TRUE(oracle::contains(eval_max(e, s).query(6), oracle::Mp(1.0)));
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), Errc::Timeout);
      EXPECT_TRUE(s == Strategy::Poly || s == Strategy::LPoly);
    }
  }
}

TEST(Eval, RungeQuotient) {
  Expr e = parse("(sin(10*x)+cos(7*pi*x))/(100*x^2+1)");
  Ball pp = eval_integral(e, Strategy::PPoly).query(16);
  Ball fr = eval_integral(e, Strategy::LPPoly).query(16);
  EXPECT_LE(pp.radius(), Dyadic::pow2(-16));
  // Both enclose the same number, so they must intersect.
  EXPECT_LE(max(pp.lo(), fr.lo()), min(pp.hi(), fr.hi()));
  oracle::Mp truth = oracle::simpson(
      [](const oracle::Mp& x) {
        return (oracle::sin(oracle::Mp(10.0) * x) + oracle::cos(oracle::Mp(7.0) * oracle::pi() * x)) /
               (oracle::Mp(100.0) * x * x + oracle::Mp(1.0));
      },
      oracle::Mp(-1.0), oracle::Mp(1.0), 20000);
  EXPECT_NEAR(pp.center().to_double(), truth.to_double(), 1e-4);
}

TEST(Eval, UnsupportedAndUnbounded) {
  try {
    eval_max(parse("max(x, 1)"), Strategy::Frac).query(4);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Unsupported);
  }
  try {
    eval_integral(parse("1/x"), Strategy::PPoly).query(4);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotBoundedBelow);
  }
  // A frac may take sin of a polynomial but not of a quotient.
  EXPECT_NO_THROW(eval_integral(parse("sin(x*x)"), Strategy::Frac).query(8));
  EXPECT_THROW(eval_integral(parse("sin(1/(x*x+1))"), Strategy::Frac).query(8), Error);
}

TEST(Eval, WitnessIsUsed) {
  Expr e = ex::div(ex::one(), parse("x*x+1"), Dyadic(1));
  Ball b = eval_integral(e, Strategy::PPoly).query(20);
  EXPECT_TRUE(oracle::contains(b, oracle::pi() / oracle::Mp(2.0)));
  Expr bad = ex::div(ex::one(), parse("x*x+1"), Dyadic(0));
  EXPECT_THROW(eval_integral(bad, Strategy::PPoly).query(4), Error);
}

}  // namespace
