#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>

namespace nilfix {
namespace {

using testing::torus_map;
using testing::rational_matrix;
using testing::shared;
using testing::torus_endomorphism;
using testing::torus_point;

using Point = std::vector<Rational>;

std::vector<Point> coordinates(const std::vector<TorusFixedPoint>& points) {
  std::vector<Point> out;
  for (const auto& p : points) out.push_back(p.coordinates);
  return out;
}

Point point(const char* x, const char* y) { return {parse_rational(x), parse_rational(y)}; }

/// Scans the grid (1/L) Z^k in [0, 1)^k, L the common denominator of
/// (I - M)^{-1} and (I - M)^{-1} g over all lifts.
std::set<Point, detail::RationalVectorLess> grid_scan(const AffineNValuedMap& m) {
  const std::size_t k = m.group().dimension();
  Integer l = 1;
  for (const auto& lift : m.lifts()) {
    RationalMatrix a = identity_minus(layer_matrices(lift.linear).front());
    RationalMatrix a_inv = inverse(a);
    for (const auto& q : a_inv.entries()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    for (const auto& q : a_inv.apply(lift.translation.layer(0)))
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  }
  const long side = l.get_si();
  std::set<Point, detail::RationalVectorLess> found;
  std::vector<long> t(k, 0);
  for (;;) {
    Point x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = make_rational(t[i], side);
    for (const auto& lift : m.lifts()) {
      Point y = layer_matrices(lift.linear).front().apply(x);
      bool fixed = true;
      for (std::size_t i = 0; i < k; ++i) fixed = fixed && is_integer(Rational(y[i] + lift.translation.layer(0)[i] - x[i]));
      if (fixed) found.insert(x);
    }
    std::size_t i = 0;
    while (i < k && ++t[i] == side) t[i++] = 0;
    if (i == k) break;
  }
  return found;
}

TEST(FixedPoints, TorusFHasSixPoints) {
  auto points = enumerate_fixed_points(torus_map(false));
  EXPECT_EQ(coordinates(points), (std::vector<Point>{point("0", "0"), point("0", "1/4"), point("0", "1/2"),
                                                     point("0", "3/4"), point("1/2", "1/4"), point("1/2", "3/4")}));
  std::vector<std::size_t> lifts;
  for (const auto& p : points) lifts.push_back(p.lift_index);
  EXPECT_EQ(lifts, (std::vector<std::size_t>{0, 2, 0, 2, 2, 2}));
}

TEST(FixedPoints, TorusGSkippingSingularLift) {
  auto points = enumerate_fixed_points(torus_map(true), true);
  EXPECT_EQ(coordinates(points), (std::vector<Point>{point("0", "0"), point("0", "1/2")}));
  EXPECT_THROW(enumerate_fixed_points(torus_map(true)), SingularLiftError);
}

TEST(FixedPoints, WitnessSolvesTheCongruence) {
  for (bool variant : {false, true}) {
    AffineNValuedMap m = torus_map(variant);
    for (const auto& p : enumerate_fixed_points(m, true)) {
      const AffineLift& lift = m.lift(p.lift_index);
      Point ax = identity_minus(layer_matrices(lift.linear).front()).apply(p.coordinates);
      for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(ax[i], lift.translation.layer(0)[i] + Rational(p.witness[i]));
        EXPECT_GE(p.coordinates[i], 0);
        EXPECT_LT(p.coordinates[i], 1);
      }
    }
  }
}

TEST(FixedPoints, MatchGridScanAndNielsenOnRandomMaps) {
  std::mt19937_64 rng(12);
  auto t2 = shared(abelian(2));
  int checked = 0;
  while (checked < 50) {
    IntegerMatrix a = testing::random_integer_matrix(rng, 2, 3);
    RationalMatrix m = to_rational(a);
    Rational d = abs(det(identity_minus(m)));
    if (d == 0 || d > 30) continue;
    GroupElement g = torus_point("0", "0");
    g.layer(0)[0] = make_rational(static_cast<long>(rng() % 4), 4);
    g.layer(0)[1] = make_rational(static_cast<long>(rng() % 3), 3);
    AffineNValuedMap f(t2, {{g, torus_endomorphism(t2, m)}});
    auto points = enumerate_fixed_points(f);
    auto grid = grid_scan(f);
    EXPECT_EQ(coordinates(points), std::vector<Point>(grid.begin(), grid.end()));
    FixedPointCount c = count_matches_nielsen(f);
    EXPECT_TRUE(c.matches) << c.fixed_points << " vs " << c.nielsen;
    EXPECT_EQ(Rational(static_cast<unsigned long>(points.size())), d);
    ++checked;
  }
}

TEST(FixedPoints, TwoValuedCircleMaps) {
  // x -> {m x / 2, (m x + 1) / 2} with m odd: N = |2 - m|.
  auto z = shared(abelian(1));
  for (long m = -9; m <= 9; m += 2) {
    auto phi = torus_endomorphism(z, RationalMatrix{{make_rational(m, 2)}});
    AffineNValuedMap f(z, {{z->element({0}), phi}, {GroupElement({{make_rational(1, 2)}}), phi}});
    FixedPointCount c = count_matches_nielsen(f);
    EXPECT_TRUE(c.matches) << "m = " << m;
    EXPECT_EQ(c.nielsen, std::abs(2 - m));
    auto grid = grid_scan(f);
    EXPECT_EQ(coordinates(enumerate_fixed_points(f)), std::vector<Point>(grid.begin(), grid.end()));
  }
}

TEST(FixedPoints, TorusFMatchesGridScan) {
  auto grid = grid_scan(torus_map(false));
  EXPECT_EQ(coordinates(enumerate_fixed_points(torus_map(false))), std::vector<Point>(grid.begin(), grid.end()));
  EXPECT_TRUE(count_matches_nielsen(torus_map(false)).matches);
}

TEST(FixedPoints, RejectsNonAbelianGroups) {
  auto h = shared(heisenberg());
  AffineNValuedMap m(h, {{h->identity(), testing::heisenberg_diagonal(h, 2, 3, 6)}});
  EXPECT_THROW(enumerate_fixed_points(m), std::invalid_argument);
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(brute_force_reidemeister_z_k(IntegerMatrix{{6}}, rational_matrix({{"1/2"}})), 3);
  EXPECT_EQ(brute_force_reidemeister_z_k(IntegerMatrix::identity(2), rational_matrix({{"-1", "0"}, {"0", "-1"}})), 4);
  EXPECT_EQ(brute_force_reidemeister_z_k(IntegerMatrix::identity(2), rational_matrix({{"2", "0"}, {"0", "2"}})), 1);
  EXPECT_EQ(Rational(brute_force_reidemeister_z_k(IntegerMatrix::identity(3), rational_matrix({{"2", "1", "0"}, {"0", "3", "0"}, {"1", "0", "-1"}}))),
            Rational(abs(det(identity_minus(rational_matrix({{"2", "1", "0"}, {"0", "3", "0"}, {"1", "0", "-1"}}))))));
}

TEST(BruteForce, Guards) {
  EXPECT_THROW(brute_force_reidemeister_z_k(IntegerMatrix{{1}}, rational_matrix({{"1"}})), std::invalid_argument);
  EXPECT_THROW(brute_force_reidemeister_z_k(IntegerMatrix{{1}}, rational_matrix({{"1/2"}})), std::invalid_argument);
  EXPECT_THROW(brute_force_reidemeister_z_k(IntegerMatrix{{1}}, rational_matrix({{"500"}})), std::invalid_argument);
  EXPECT_THROW(brute_force_reidemeister_z_k(IntegerMatrix::identity(4), RationalMatrix::identity(4)), std::invalid_argument);
}

}  // namespace
}  // namespace nilfix
