#pragma once

// Generalized twisted conjugacy on finitely generated torsion-free nilpotent
// groups: alpha ~ gamma * beta * phi(gamma)^{-1} for gamma in a finite-index
// subgroup H <= N and a morphism phi : H -> N.
//
// H enters layer by layer: on N_i / N_{i+1} = Z^{k_i} it is the sublattice
// B_i Z^{k_i}, and phi induces z -> M_i z on it.

#include "nilfix/endomorphism.hpp"
#include "nilfix/exact_linalg.hpp"
#include "nilfix/malcev_group.hpp"

#include <numeric>
#include <optional>
#include <vector>

namespace nilfix {

struct LayerDatum {
  IntegerMatrix B;
  RationalMatrix M;

  /// Throws std::invalid_argument unless B, M are square of equal size,
  /// det B != 0 and M B is integral.
  void validate() const {
    if (!B.is_square() || !M.is_square() || B.rows() != M.rows() || B.rows() == 0)
      throw DimensionError("layer datum needs square B and M of equal size");
    if (det(B) == 0) throw std::invalid_argument("layer datum: det(B) = 0");
    if (!is_integral(M * to_rational(B)))
      throw std::invalid_argument("layer datum: M*B is not integral");
  }

  std::size_t rank() const { return B.rows(); }

  /// (I - M) B, integral by the datum invariants.
  IntegerMatrix twisted_lattice() const { return to_integer(identity_minus(M) * to_rational(B)); }
};

struct TwistedSetup {
  std::vector<LayerDatum> layers;

  void validate() const {
    if (layers.empty()) throw std::invalid_argument("twisted setup needs at least one layer");
    for (const auto& l : layers) l.validate();
  }
};

/// [Z^k : (I - M) B Z^k], infinite when I - M is singular.
inline ExtendedCount reidemeister_abelian(const LayerDatum& d) {
  d.validate();
  return lattice_index(d.twisted_lattice());
}

/// prod_i R(phi_i).
inline ExtendedCount reidemeister_product(const TwistedSetup& s) {
  s.validate();
  ExtendedCount r(1);
  for (const auto& l : s.layers) r *= reidemeister_abelian(l);
  return r;
}

struct IndexMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// [N : H] * |det(I - M)|_inf with M the block matrix of the M_i. The index
/// must equal prod_i |det B_i|.
inline ExtendedCount reidemeister_full(const Integer& index_N_H, const TwistedSetup& s) {
  s.validate();
  Integer expected = 1;
  Rational d = 1;
  for (const auto& l : s.layers) {
    expected *= lattice_index(l.B).value();
    d *= det(identity_minus(l.M));
  }
  if (index_N_H != expected)
    throw IndexMismatchError("[N:H] = " + index_N_H.get_str() + " but the layers give " +
                             expected.get_str());
  return to_count(ExtendedRational(Rational(index_N_H)) * abs_inf(d));
}

inline bool is_infinite(const TwistedSetup& s) {
  s.validate();
  for (const auto& l : s.layers)
    if (det(identity_minus(l.M)) == 0) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force oracles.

struct OracleGuardError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Counts classes of Z^k under z1 ~ z2 <=> z1 - z2 in (I - M) B Z^k by
/// sweeping the box [0, d)^k, d = |det((I - M) B)|, and keeping one
/// representative per class. Membership of a difference is decided by an
/// exact rational solve. k <= 3.
inline Integer oracle_abelian_classes(const LayerDatum& datum) {
  datum.validate();
  const std::size_t k = datum.rank();
  if (k > 3) throw OracleGuardError("abelian oracle limited to k <= 3");
  IntegerMatrix lattice = datum.twisted_lattice();
  Integer d = abs(det(lattice));
  if (d == 0) throw OracleGuardError("abelian oracle: (I - M) B is singular");
  if (d > 200) throw OracleGuardError("abelian oracle: index bound too large for enumeration");
  RationalMatrix solve = inverse(to_rational(lattice));
  const long side = d.get_si();

  std::vector<std::vector<Rational>> representatives;
  std::vector<long> point(k, 0);
  auto same_class = [&](const std::vector<Rational>& a, const std::vector<long>& b) {
    std::vector<Rational> diff(k);
    for (std::size_t i = 0; i < k; ++i) diff[i] = a[i] - b[i];
    for (const auto& q : solve.apply(diff))
      if (!is_integer(q)) return false;
    return true;
  };
  for (;;) {
    bool known = false;
    for (const auto& r : representatives)
      if (same_class(r, point)) {
        known = true;
        break;
      }
    if (!known) representatives.emplace_back(point.begin(), point.end());

    std::size_t i = 0;
    while (i < k && ++point[i] == side) point[i++] = 0;
    if (i == k) break;
  }
  return Integer(static_cast<unsigned long>(representatives.size()));
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// One move of the twisted action: alpha -> gamma * alpha * image^{-1}.
struct TwistedMove {
  GroupElement gamma;
  GroupElement image;
};

/// Union-find census of lattice elements in [-box_bound, box_bound]^K under
/// the given moves (and their inverses); counts the components that meet the
/// core box [-(box_bound - 2), box_bound - 2]^K.
inline std::size_t oracle_twisted_classes(const GroupPresentation& g,
                                          const std::vector<TwistedMove>& moves, int box_bound) {
  if (box_bound < 2 || box_bound > 6) throw OracleGuardError("box_bound must lie in [2, 6]");
  const std::size_t dim = g.dimension();
  const long side = 2L * box_bound + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    total *= static_cast<std::size_t>(side);
    if (total > 5'000'000) throw OracleGuardError("box census too large");
  }
  const auto order = g.basis();

  auto decode = [&](std::size_t index) {
    GroupElement e = g.identity();
    for (const auto& b : order) {
      e[b] = static_cast<long>(index % static_cast<std::size_t>(side)) - box_bound;
      index /= static_cast<std::size_t>(side);
    }
    return e;
  };
  auto encode = [&](const GroupElement& e) -> std::optional<std::size_t> {
    std::size_t index = 0, scale = 1;
    for (const auto& b : order) {
      const Rational& q = e[b];
      if (!is_integer(q) || abs(q) > box_bound) return std::nullopt;
      index += static_cast<std::size_t>(q.get_num().get_si() + box_bound) * scale;
      scale *= static_cast<std::size_t>(side);
    }
    return index;
  };

  std::vector<TwistedMove> all_moves;
  for (const auto& m : moves) {
    all_moves.push_back({m.gamma, inverse(g, m.image)});
    all_moves.push_back({inverse(g, m.gamma), m.image});
  }

  detail::DisjointSets sets(total);
  for (std::size_t i = 0; i < total; ++i) {
    GroupElement alpha = decode(i);
    for (const auto& m : all_moves) {
      // all_moves stores gamma and image^{-1}
      GroupElement moved = multiply(g, multiply(g, m.gamma, alpha), m.image);
      if (auto j = encode(moved)) sets.unite(i, *j);
    }
  }

  const long core = box_bound - 2;
  std::vector<bool> counted(total, false);
  std::size_t classes = 0;
  for (std::size_t i = 0; i < total; ++i) {
    GroupElement alpha = decode(i);
    bool in_core = true;
    for (const auto& b : order)
      if (abs(alpha[b]) > core) {
        in_core = false;
        break;
      }
    if (!in_core) continue;
    std::size_t root = sets.find(i);
    if (!counted[root]) {
      counted[root] = true;
      ++classes;
    }
  }
  return classes;
}

/// Twisted conjugacy census for H = N with moves over the basis elements:
/// alpha -> a * alpha * phi(a)^{-1}. Requires c <= 2, no eigenvalue 1, and
/// phi(N) <= N.
inline std::size_t oracle_nilpotent_classes(const GroupPresentation& g, const Endomorphism& phi,
                                            int box_bound) {
  if (g.nilpotency_class() > 2) throw OracleGuardError("nilpotent oracle limited to class <= 2");
  if (!(phi.group() == g)) throw std::invalid_argument("endomorphism of a different group");
  if (has_eigenvalue_one(phi)) throw OracleGuardError("nilpotent oracle: phi has eigenvalue 1");
  if (!phi.preserves_lattice())
    throw OracleGuardError("nilpotent oracle: phi does not map the lattice into itself");
  std::vector<TwistedMove> moves;
  for (const auto& b : g.basis()) moves.push_back({g.basis_element(b), phi.image(b)});
  return oracle_twisted_classes(g, moves, box_bound);
}

struct BoxCount {
  int box_bound = 0;
  std::size_t classes = 0;
};

/// Census for each bound in [first, last]; stabilization is visible in the
/// returned sequence.
inline std::vector<BoxCount> oracle_nilpotent_census(const GroupPresentation& g,
                                                     const Endomorphism& phi, int first, int last) {
  std::vector<BoxCount> out;
  for (int b = first; b <= last; ++b) out.push_back({b, oracle_nilpotent_classes(g, phi, b)});
  return out;
}

/// The last `window` counts agree.
inline bool is_stable(const std::vector<BoxCount>& census, std::size_t window = 3) {
  if (census.size() < window) return false;
  for (std::size_t i = census.size() - window + 1; i < census.size(); ++i)
    if (census[i].classes != census[i - 1].classes) return false;
  return true;
}

}  // namespace nilfix
