#include "test_support.hpp"

#include <gtest/gtest.h>

namespace nilfix {
namespace {

using testing::cofactor_det;
using testing::random_integer_matrix;
using testing::rational_matrix;

TEST(Rational, ParsesAndCanonicalizes) {
  EXPECT_EQ(parse_rational("-3/6").get_str(), "-1/2");
  EXPECT_EQ(parse_rational("4/2").get_str(), "2");
  EXPECT_EQ(parse_rational("7").get_str(), "7");
  EXPECT_EQ(to_string(parse_rational("0/5")), "0");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/-2"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

TEST(Rational, ArithmeticIsExact) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    Rational a = make_rational(static_cast<long>(rng() % 2001) - 1000, 1 + static_cast<long>(rng() % 997));
    Rational b = make_rational(static_cast<long>(rng() % 2001) - 1000, 1 + static_cast<long>(rng() % 991));
    Rational s = a + b;
    EXPECT_EQ(Rational(s - b), a);
    EXPECT_GT(a.get_den(), 0);
  }
}

TEST(AbsInf, ZeroIsInfinite) {
  EXPECT_TRUE(abs_inf(0).is_infinite());
  EXPECT_EQ(abs_inf(-5), ExtendedRational(Rational(5)));
  EXPECT_EQ(abs_inf(parse_rational("1/2")).value(), parse_rational("1/2"));
}

TEST(ExtendedCount, InfiniteAbsorbs) {
  const ExtendedCount inf = ExtendedCount::infinite();
  EXPECT_TRUE((inf + ExtendedCount(3)).is_infinite());
  EXPECT_TRUE((ExtendedCount(2) * inf).is_infinite());
  EXPECT_EQ(ExtendedCount(2) * ExtendedCount(5), ExtendedCount(10));
  EXPECT_THROW(inf * ExtendedCount(0), std::logic_error);
  EXPECT_LT(ExtendedCount(1000000), inf);
  EXPECT_LE(ExtendedCount(2), ExtendedCount(2));
  EXPECT_EQ(inf.to_string(), "infinite");
  EXPECT_THROW(inf.value(), std::logic_error);
}

TEST(Det, IMinusTorusLift) {
  EXPECT_EQ(det(identity_minus(rational_matrix({{"1/2", "0"}, {"0", "-1"}}))), 1);
}

TEST(Det, Identity) {
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_EQ(det(RationalMatrix::identity(k)), 1);
    EXPECT_EQ(det(IntegerMatrix::identity(k)), 1);
  }
}

TEST(Det, NonSquareIsDimensionError) {
  EXPECT_THROW(det(RationalMatrix(2, 3)), DimensionError);
  EXPECT_THROW(det(IntegerMatrix(3, 2)), DimensionError);
  EXPECT_THROW(smith_normal_form(IntegerMatrix(1, 2)), DimensionError);
}

TEST(Det, MatchesCofactorExpansion) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 4;
    IntegerMatrix a = random_integer_matrix(rng, n, 9);
    Rational expected = cofactor_det(to_rational(a));
    EXPECT_EQ(det(to_rational(a)), expected);
    EXPECT_EQ(Rational(det(a)), expected);
  }
}

TEST(Det, RationalEntriesMatchCofactorExpansion) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 100; ++k) {
    RationalMatrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        m(r, c) = make_rational(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 4));
    EXPECT_EQ(det(m), cofactor_det(m));
  }
}

TEST(SmithNormalForm, Diag23) {
  IntegerMatrix a{{2, 0}, {0, 3}};
  auto snf = smith_normal_form(a);
  EXPECT_EQ(snf.diagonal, (IntegerMatrix{{1, 0}, {0, 6}}));
  EXPECT_EQ(snf.left * a * snf.right, snf.diagonal);
}

TEST(SmithNormalForm, IdentityAndRankDeficient) {
  EXPECT_EQ(smith_normal_form(IntegerMatrix::identity(3)).diagonal, IntegerMatrix::identity(3));
  IntegerMatrix a{{2, 0}, {0, 0}};
  EXPECT_EQ(smith_normal_form(a).diagonal, a);
}

void expect_smith_sound(const IntegerMatrix& a) {
  auto [u, s, v] = smith_normal_form(a);
  ASSERT_EQ(u * a * v, s);
  EXPECT_EQ(abs(det(u)), 1);
  EXPECT_EQ(abs(det(v)), 1);
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r != c) {
        EXPECT_EQ(s(r, c), 0);
      }
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_GE(s(i, i), 0);
    if (i + 1 < n) {
      if (s(i, i) == 0) {
        EXPECT_EQ(s(i + 1, i + 1), 0);
      } else {
        EXPECT_TRUE(mpz_divisible_p(s(i + 1, i + 1).get_mpz_t(), s(i, i).get_mpz_t()));
      }
    }
  }
}

TEST(SmithNormalForm, RandomSoundness) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 300; ++k) expect_smith_sound(random_integer_matrix(rng, 1 + rng() % 4, 5));
}

TEST(SmithNormalForm, LargeEntries) {
  IntegerMatrix a{{Integer("123456789012345678901"), 6, 10}, {4, 14, Integer("-98765432109876")}, {8, 2, 30}};
  expect_smith_sound(a);
}

TEST(LatticeIndex, Examples) {
  EXPECT_EQ(lattice_index(IntegerMatrix{{2, 0}, {0, 3}}), ExtendedCount(6));
  EXPECT_EQ(lattice_index(IntegerMatrix::identity(4)), ExtendedCount(1));
  EXPECT_TRUE(lattice_index(IntegerMatrix{{1, 2}, {2, 4}}).is_infinite());
}

TEST(LatticeIndex, AgreesWithAbsInfOfDet) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    IntegerMatrix a = random_integer_matrix(rng, 1 + rng() % 4, 3);
    EXPECT_EQ(lattice_index(a), to_count(abs_inf(Rational(det(a)))));
  }
}

TEST(Inverse, RoundTrip) {
  RationalMatrix m = rational_matrix({{"1/2", "3"}, {"-1", "2/3"}});
  EXPECT_EQ(m * inverse(m), RationalMatrix::identity(2));
  EXPECT_THROW(inverse(rational_matrix({{"1", "2"}, {"2", "4"}})), std::domain_error);
}

}  // namespace
}  // namespace nilfix
