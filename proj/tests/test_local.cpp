#include <gtest/gtest.h>

#include "fnreps/eval.hpp"
#include "oracle.hpp"

using namespace fnreps;

namespace {

TEST(Local, EquidistantPartitionIsStrictlyIncreasing) {
  for (std::int64_t k : {1, 3, 7, 10, 33}) {
    auto pts = detail::equidistant(k);
    ASSERT_EQ(pts.size(), static_cast<std::size_t>(k + 1));
    EXPECT_EQ(pts.front(), Dyadic(-1));
    EXPECT_EQ(pts.back(), Dyadic(1));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) EXPECT_LT(pts[i], pts[i + 1]);
  }
}

TEST(Local, LPolyLocalizesToOnePiece) {
  LocalName f = eval_local(parse("sin(10*x)"), LocalName::Kind::LPoly);
  DyadicInterval D(Dyadic(mpz_class(1), -2), Dyadic(mpz_class(3), -2));
  PPoly p = f.localize(D, 20);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.lo(), D.lo());
  EXPECT_EQ(p.hi(), D.hi());
  // Values agree with sin at dyadic points of D.
  for (int i = 0; i <= 16; ++i) {
    Dyadic x = D.lo() + Dyadic(mpz_class(i), -5);
    Ball b = pp_eval(p, x);
    EXPECT_TRUE(oracle::contains(b, oracle::sin(oracle::Mp(10.0) * oracle::Mp(x))));
    EXPECT_LE(b.radius(), Dyadic::pow2(-19));
  }
}

TEST(Local, IntegrateMatchesClosedForm) {
  // ∫ cos(20x) = sin(20)/10.
  oracle::Mp truth = oracle::sin(oracle::Mp(20.0)) / oracle::Mp(10.0);
  for (auto kind : {LocalName::Kind::LPoly, LocalName::Kind::LPPoly}) {
    LocalName f = eval_local(parse("cos(20*x)"), kind);
    for (std::int64_t n : {4, 12, 24}) {
      Ball b = local_integrate(f, n);
      EXPECT_TRUE(oracle::contains(b, truth)) << n;
      EXPECT_LE(b.radius(), Dyadic::pow2(-n)) << n;
    }
  }
}

TEST(Local, RangeMaxOfSmoothAndKinked) {
  LocalName f = eval_local(parse("sin(10*x)+cos(20*x)"), LocalName::Kind::LPoly);
  oracle::Mp best(-10.0);
  for (int i = 0; i <= 200000; ++i) {
    oracle::Mp x(mpq_class(i - 100000, 100000));
    best = oracle::max(best, oracle::sin(oracle::Mp(10.0) * x) + oracle::cos(oracle::Mp(20.0) * x));
  }
  Ball b = local_range_max(f, 16);
  EXPECT_LE(b.radius(), Dyadic::pow2(-16));
  // The grid maximum is within 1e-8 of the true one (second derivative ≤ 500, spacing 1e-5).
  EXPECT_LE(b.lo().to_double(), best.to_double() + 1e-12);
  EXPECT_GE(b.hi().to_double(), best.to_double());
  EXPECT_NEAR(b.center().to_double(), best.to_double(), 2e-5);

  LocalName k = eval_local(parse("max(x, -x)"), LocalName::Kind::LPPoly);
  EXPECT_TRUE(oracle::contains(local_range_max(k, 10), oracle::Mp(1.0)));
  EXPECT_TRUE(oracle::contains(local_integrate(k, 10), oracle::Mp(1.0)));
}

}  // namespace
