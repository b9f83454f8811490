#include "test_support.hpp"

#include <gtest/gtest.h>

namespace nilfix {
namespace {

using testing::heisenberg_diagonal;
using testing::rational_matrix;
using testing::shared;
using testing::torus_endomorphism;

LayerDatum scalar_datum(long n, const char* m) { return {IntegerMatrix{{n}}, rational_matrix({{m}})}; }

TEST(Abelian, IndexSixHalf) {
  LayerDatum d = scalar_datum(6, "1/2");
  EXPECT_EQ(reidemeister_abelian(d), ExtendedCount(3));
  EXPECT_EQ(oracle_abelian_classes(d), 3);
  EXPECT_EQ(brute_force_reidemeister_z_k(d.B, d.M), 3);
}

TEST(Abelian, SubgroupFamily) {
  // H = nZ, phi(n) = d with d | n: classes n - d, infinite when d = n.
  for (long n = 1; n <= 12; ++n)
    for (long d = 1; d <= n; ++d) {
      if (n % d) continue;
      LayerDatum datum{IntegerMatrix{{n}}, RationalMatrix{{make_rational(d, n)}}};
      ExtendedCount r = reidemeister_abelian(datum);
      if (d == n)
        EXPECT_TRUE(r.is_infinite());
      else
        EXPECT_EQ(r, ExtendedCount(n - d));
    }
  EXPECT_TRUE(reidemeister_abelian(scalar_datum(6, "1")).is_infinite());
}

TEST(Abelian, RejectsInadmissibleData) {
  EXPECT_THROW(reidemeister_abelian(scalar_datum(0, "1")), std::invalid_argument);
  EXPECT_THROW(reidemeister_abelian(scalar_datum(4, "1/3")), std::invalid_argument);
  EXPECT_THROW(reidemeister_abelian({IntegerMatrix{{1}}, RationalMatrix::identity(2)}), DimensionError);
}

TEST(Abelian, FormulaMatchesBothOracles) {
  std::mt19937_64 rng(31);
  int checked = 0;
  while (checked < 50) {
    const std::size_t k = 1 + rng() % 2;
    IntegerMatrix b = testing::random_integer_matrix(rng, k, 3);
    if (det(b) == 0) continue;
    IntegerMatrix c = testing::random_integer_matrix(rng, k, 4);
    LayerDatum datum{b, to_rational(c) * inverse(to_rational(b))};
    Integer d = abs(det(datum.twisted_lattice()));
    if (d == 0 || d > 200) continue;
    ExtendedCount formula = reidemeister_abelian(datum);
    ASSERT_TRUE(formula.is_finite());
    EXPECT_EQ(brute_force_reidemeister_z_k(datum.B, datum.M), formula.value());
    EXPECT_EQ(oracle_abelian_classes(datum), formula.value());
    ++checked;
  }
}

TEST(Product, HeisenbergSetup) {
  TwistedSetup s{{{IntegerMatrix::identity(2), rational_matrix({{"2", "0"}, {"0", "3"}})},
                  {IntegerMatrix{{1}}, rational_matrix({{"6"}})}}};
  EXPECT_EQ(reidemeister_product(s), ExtendedCount(10));
  EXPECT_EQ(reidemeister_full(1, s), ExtendedCount(10));
  EXPECT_FALSE(is_infinite(s));
  EXPECT_THROW(reidemeister_full(2, s), IndexMismatchError);
}

TEST(Product, InfiniteLayerMakesEverythingInfinite) {
  TwistedSetup s{{scalar_datum(6, "1/2"), scalar_datum(1, "1")}};
  EXPECT_TRUE(reidemeister_product(s).is_infinite());
  EXPECT_TRUE(reidemeister_full(6, s).is_infinite());
  EXPECT_TRUE(is_infinite(s));
}

TEST(Full, AgreesWithProductOnRandomSetups) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 100; ++k) {
    TwistedSetup s;
    Integer index = 1;
    for (int layer = 0; layer < 2; ++layer) {
      long n = 1 + static_cast<long>(rng() % 6);
      long c = static_cast<long>(rng() % 13) - 6;
      s.layers.push_back({IntegerMatrix{{n}}, RationalMatrix{{make_rational(c, n)}}});
      index *= n;
    }
    EXPECT_EQ(reidemeister_full(index, s), reidemeister_product(s));
  }
}

TEST(NilpotentOracle, HeisenbergCensusStabilizesAtTen) {
  auto h = shared(heisenberg());
  auto phi = heisenberg_diagonal(h, 2, 3, 6);
  auto census = oracle_nilpotent_census(*h, phi, 3, 6);
  std::vector<std::size_t> counts;
  for (const auto& c : census) counts.push_back(c.classes);
  EXPECT_EQ(counts, (std::vector<std::size_t>{8, 10, 10, 10}));
  EXPECT_TRUE(is_stable(census));
  EXPECT_EQ(abs_inf(det_i_minus_differential(phi)).value(), 10);
}

TEST(NilpotentOracle, AbelianExamples) {
  auto z = shared(abelian(1));
  auto triple = torus_endomorphism(z, rational_matrix({{"3"}}));
  EXPECT_EQ(oracle_nilpotent_classes(*z, triple, 5), 2u);
  auto t2 = shared(abelian(2));
  auto twice = torus_endomorphism(t2, rational_matrix({{"2", "0"}, {"0", "2"}}));
  EXPECT_EQ(oracle_nilpotent_classes(*t2, twice, 5), 1u);
  auto flip = torus_endomorphism(t2, rational_matrix({{"-1", "0"}, {"0", "-1"}}));
  EXPECT_EQ(oracle_nilpotent_classes(*t2, flip, 6), 4u);
}

TEST(NilpotentOracle, Guards) {
  auto h = shared(heisenberg());
  EXPECT_THROW(oracle_nilpotent_classes(*h, heisenberg_diagonal(h, 1, 3, 3), 4), OracleGuardError);
  EXPECT_THROW(oracle_nilpotent_classes(*h, heisenberg_diagonal(h, make_rational(1, 2), 4, 2), 4),
               OracleGuardError);
  EXPECT_THROW(oracle_nilpotent_classes(*h, heisenberg_diagonal(h, 2, 3, 6), 7), OracleGuardError);
  EXPECT_THROW(oracle_nilpotent_classes(*h, heisenberg_diagonal(h, 2, 3, 6), 1), OracleGuardError);
  auto big = shared(abelian(9));
  EXPECT_THROW(oracle_twisted_classes(*big, {}, 6), OracleGuardError);
}

TEST(TwistedOracle, SubgroupOfIndexTwoInHeisenberg) {
  // H = <a^2, b, c>, phi = (1/2, 4, 2) on H; classes of N under H.
  auto h = shared(heisenberg());
  auto phi = heisenberg_diagonal(h, make_rational(1, 2), 4, 2);
  std::vector<TwistedMove> moves{
      {h->element({2, 0, 0}), h->element({1, 0, 0})},
      {h->element({0, 1, 0}), phi.image({0, 1})},
      {h->element({0, 0, 1}), phi.image({1, 0})},
  };
  std::vector<BoxCount> census;
  for (int b = 4; b <= 6; ++b) census.push_back({b, oracle_twisted_classes(*h, moves, b)});
  EXPECT_TRUE(is_stable(census));
  TwistedSetup s{{{IntegerMatrix{{2, 0}, {0, 1}}, rational_matrix({{"1/2", "0"}, {"0", "4"}})},
                  {IntegerMatrix{{1}}, rational_matrix({{"2"}})}}};
  EXPECT_EQ(ExtendedCount(census.back().classes), reidemeister_full(2, s));
  EXPECT_EQ(reidemeister_full(2, s), ExtendedCount(3));
}

TEST(Stability, Window) {
  EXPECT_FALSE(is_stable({{1, 3}, {2, 3}}));
  EXPECT_TRUE(is_stable({{1, 1}, {2, 3}, {3, 3}, {4, 3}}));
  EXPECT_FALSE(is_stable({{2, 3}, {3, 3}, {4, 4}}));
}

}  // namespace
}  // namespace nilfix
