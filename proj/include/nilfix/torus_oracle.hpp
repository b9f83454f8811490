#pragma once

// Geometric oracle on tori Z^k \ R^k: lists the actual fixed points of an
// affine n-valued map and counts Reidemeister classes by residue enumeration.

#include "nilfix/exact_linalg.hpp"
#include "nilfix/nvalued_map.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

namespace nilfix {

struct TorusFixedPoint {
  std::vector<Rational> coordinates;  // in [0, 1)^k
  std::size_t lift_index = 0;         // 0-based
  std::vector<Integer> witness;       // z with (I - M) x = g + z

  friend bool operator==(const TorusFixedPoint&, const TorusFixedPoint&) = default;
};

struct SingularLiftError : std::domain_error {
  SingularLiftError(std::size_t lift, const std::string& what)
      : std::domain_error(what), lift(lift) {}
  std::size_t lift;
};

namespace detail {

struct RationalVectorLess {
  bool operator()(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const Rational& x, const Rational& y) { return x < y; });
  }
};

inline Rational fractional_part(const Rational& q) {
  Integer floor;
  mpz_fdiv_q(floor.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return q - Rational(floor);
}

/// Points of (A^{-1} g + A^{-1} Z^k) mod Z^k, enumerated through the Smith
/// form of the integer lattice D A^{-1} modulo D Z^k.
inline std::vector<std::vector<Rational>> congruence_solutions(const RationalMatrix& a,
                                                              const std::vector<Rational>& g) {
  const std::size_t k = a.rows();
  RationalMatrix a_inv = inverse(a);
  Integer denominator = 1;
  for (const auto& q : a_inv.entries()) mpz_lcm(denominator.get_mpz_t(), denominator.get_mpz_t(), q.get_den_mpz_t());
  RationalMatrix scaled = a_inv;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) scaled(r, c) *= denominator;
  IntegerMatrix lattice = to_integer(scaled);

  // lattice = U^{-1} S V^{-1}, so lattice Z^k = U^{-1} S Z^k.
  SmithDecomposition snf = smith_normal_form(lattice);
  IntegerMatrix u_inv = to_integer(inverse(to_rational(snf.left)));
  std::vector<Integer> steps(k), orders(k);
  for (std::size_t j = 0; j < k; ++j) {
    steps[j] = snf.diagonal(j, j);
    Integer gcd_value;
    mpz_gcd(gcd_value.get_mpz_t(), denominator.get_mpz_t(), steps[j].get_mpz_t());
    orders[j] = denominator / gcd_value;
  }

  std::vector<Rational> base = a_inv.apply(g);
  std::vector<std::vector<Rational>> out;
  std::vector<Integer> t(k, 0);
  for (;;) {
    std::vector<Integer> v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = t[j] * steps[j];
    std::vector<Integer> w = u_inv.apply(v);
    std::vector<Rational> x(k);
    for (std::size_t r = 0; r < k; ++r)
      x[r] = fractional_part(base[r] + Rational(w[r]) / Rational(denominator));
    out.push_back(std::move(x));

    std::size_t j = 0;
    while (j < k && ++t[j] == orders[j]) t[j++] = 0;
    if (j == k) break;
  }
  return out;
}

}  // namespace detail

/// Fixed points of an affine n-valued map on the torus abelian(k). Lifts with
/// det(I - M_i) = 0 are rejected unless skip_singular is set, in which case
/// they are left out. Points are exact, reduced to [0, 1)^k, deduplicated and
/// sorted; each carries the smallest lift index whose congruence it solves.
inline std::vector<TorusFixedPoint> enumerate_fixed_points(const AffineNValuedMap& m,
                                                           bool skip_singular = false) {
  const GroupPresentation& g = m.group();
  if (!g.is_abelian() || g.nilpotency_class() != 1)
    throw std::invalid_argument("fixed point enumeration needs an abelian presentation");
  compute_sigma(m);
  const std::size_t k = g.dimension();

  std::vector<std::size_t> active;
  std::vector<RationalMatrix> shifted(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    shifted[i] = identity_minus(layer_matrices(m.lift(i).linear).front());
    if (det(shifted[i]) == 0) {
      if (!skip_singular)
        throw SingularLiftError(i, "lift " + std::to_string(i + 1) +
                                       " has det(I - M) = 0: its fixed set is infinite");
      continue;
    }
    active.push_back(i);
  }

  std::set<std::vector<Rational>, detail::RationalVectorLess> points;
  for (auto i : active)
    for (auto& x : detail::congruence_solutions(shifted[i], m.lift(i).translation.layer(0)))
      points.insert(std::move(x));

  std::vector<TorusFixedPoint> out;
  for (const auto& x : points) {
    // Reducing mod Z^k can move a solution to another lift of the same orbit.
    std::optional<TorusFixedPoint> found;
    for (auto i : active) {
      std::vector<Rational> ax = shifted[i].apply(x);
      const auto& g_i = m.lift(i).translation.layer(0);
      std::vector<Integer> z(k);
      bool integral = true;
      for (std::size_t r = 0; r < k && integral; ++r) {
        Rational d = ax[r] - g_i[r];
        integral = is_integer(d);
        if (integral) z[r] = d.get_num();
      }
      if (integral) {
        found = TorusFixedPoint{x, i, std::move(z)};
        break;
      }
    }
    if (!found) throw std::logic_error("reduced fixed point satisfies no lift congruence");
    out.push_back(std::move(*found));
  }
  return out;
}

struct FixedPointCount {
  bool matches = false;
  std::size_t fixed_points = 0;
  Integer nielsen;
};

/// For maps without singular lifts every fixed point class is a single point,
/// so the point count must equal the Nielsen number.
inline FixedPointCount count_matches_nielsen(const AffineNValuedMap& m) {
  FixedPointCount c;
  c.fixed_points = enumerate_fixed_points(m, false).size();
  c.nielsen = nielsen(m);
  c.matches = c.nielsen == static_cast<unsigned long>(c.fixed_points);
  return c;
}

/// |Z^k / (I - M) B Z^k| by union-find over (Z/d)^k, d = |det((I - M) B)|,
/// joining p and p + column_j mod d. k <= 3.
inline Integer brute_force_reidemeister_z_k(const IntegerMatrix& b, const RationalMatrix& m) {
  if (!b.is_square() || !m.is_square() || b.rows() != m.rows())
    throw DimensionError("brute force: B and M must be square of equal size");
  const std::size_t k = b.rows();
  if (k == 0 || k > 3) throw std::invalid_argument("brute force limited to 1 <= k <= 3");
  RationalMatrix product = identity_minus(m) * to_rational(b);
  if (!is_integral(product)) throw std::invalid_argument("brute force: (I - M) B not integral");
  IntegerMatrix lattice = to_integer(product);
  Integer d = abs(det(lattice));
  if (d == 0) throw std::invalid_argument("brute force: (I - M) B is singular");
  if (d > 200) throw std::invalid_argument("brute force: index bound too large for enumeration");
  const long side = d.get_si();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= static_cast<std::size_t>(side);

  auto encode = [&](const std::vector<long>& p) {
    std::size_t idx = 0;
    for (std::size_t i = k; i-- > 0;) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(p[i]);
    return idx;
  };
  std::vector<std::vector<long>> columns(k, std::vector<long>(k));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < k; ++r) {
      Integer v;
      mpz_fdiv_r(v.get_mpz_t(), lattice(r, c).get_mpz_t(), d.get_mpz_t());
      columns[c][r] = v.get_si();
    }

  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<long> p(k, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (const auto& col : columns) {
      std::vector<long> q(k);
      for (std::size_t r = 0; r < k; ++r) q[r] = (p[r] + col[r]) % side;
      std::size_t a = find(idx), c = find(encode(q));
      if (a != c) parent[a] = c;
    }
    std::size_t i = 0;
    while (i < k && ++p[i] == side) p[i++] = 0;
  }
  std::size_t classes = 0;
  for (std::size_t i = 0; i < total; ++i)
    if (find(i) == i) ++classes;
  return Integer(static_cast<unsigned long>(classes));
}

}  // namespace nilfix
