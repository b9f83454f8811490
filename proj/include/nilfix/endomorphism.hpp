#pragma once

// Endomorphisms of a nilpotent Lie group given by the images of every Malcev
// basis element, and the layer matrices M_1..M_c they induce on the
// free abelian layer quotients.

#include "nilfix/exact_linalg.hpp"
#include "nilfix/malcev_group.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nilfix {

struct FiltrationError : std::invalid_argument {
  FiltrationError(BasisIndex b, const std::string& what)
      : std::invalid_argument(what), basis(b) {}
  BasisIndex basis;
};

class Endomorphism {
 public:
  /// images are indexed by flat basis index. The image of a_{i,j} must have
  /// zero coordinates in every layer below i.
  Endomorphism(std::shared_ptr<const GroupPresentation> group, std::vector<GroupElement> images)
      : group_(std::move(group)), images_(std::move(images)) {
    if (!group_) throw std::invalid_argument("endomorphism without a group");
    const auto order = group_->basis();
    if (images_.size() != order.size())
      throw DimensionError("expected " + std::to_string(order.size()) + " basis images, got " +
                           std::to_string(images_.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const BasisIndex b = order[k];
      group_->require_conforming(images_[k]);
      for (std::size_t l = 0; l < b.layer; ++l)
        for (const auto& q : images_[k].layer(l))
          if (q != 0)
            throw FiltrationError(b, "image of " + basis_label(b) + " = " + to_string(images_[k]) +
                                         " has nonzero layer-" + std::to_string(l + 1) +
                                         " coordinates");
    }
  }

  static Endomorphism identity(std::shared_ptr<const GroupPresentation> group) {
    std::vector<GroupElement> images;
    for (const auto& b : group->basis()) images.push_back(group->basis_element(b));
    return Endomorphism(std::move(group), std::move(images));
  }

  const GroupPresentation& group() const { return *group_; }
  const std::shared_ptr<const GroupPresentation>& group_ptr() const { return group_; }

  const GroupElement& image(const BasisIndex& b) const { return images_.at(group_->flat_index(b)); }
  const std::vector<GroupElement>& images() const { return images_; }

  /// True when every basis image lies in the lattice, i.e. phi(N) <= N.
  bool preserves_lattice() const {
    for (const auto& x : images_)
      if (!is_lattice_element(x)) return false;
    return true;
  }

  friend bool operator==(const Endomorphism& a, const Endomorphism& b) {
    return *a.group_ == *b.group_ && a.images_ == b.images_;
  }

 private:
  std::shared_ptr<const GroupPresentation> group_;
  std::vector<GroupElement> images_;
};

/// M_i has as column j the layer-i coordinates of phi(a_{i,j}).
inline std::vector<RationalMatrix> layer_matrices(const Endomorphism& phi) {
  const GroupPresentation& g = phi.group();
  std::vector<RationalMatrix> out;
  for (std::size_t i = 0; i < g.nilpotency_class(); ++i) {
    RationalMatrix m(g.rank(i), g.rank(i));
    for (std::size_t j = 0; j < g.rank(i); ++j) {
      const GroupElement& img = phi.image({i, j});
      for (std::size_t r = 0; r < g.rank(i); ++r) m(r, j) = img.layer(i)[r];
    }
    out.push_back(std::move(m));
  }
  return out;
}

struct NotInLatticeError : std::domain_error {
  using std::domain_error::domain_error;
};

/// phi(gamma) for gamma in N, as the ordered product of phi(a_{i,j})^{e_{i,j}}
/// over the Malcev factorization gamma = prod a_{i,j}^{e_{i,j}}.
inline GroupElement evaluate_on_lattice(const Endomorphism& phi, const GroupElement& gamma) {
  const GroupPresentation& g = phi.group();
  g.require_conforming(gamma);
  if (!is_lattice_element(gamma))
    throw NotInLatticeError("evaluate_on_lattice: " + to_string(gamma) + " is not in the lattice");
  GroupElement exponents = malcev_exponents(g, gamma);
  GroupElement result = g.identity();
  for (const auto& b : g.basis()) {
    const Rational& e = exponents[b];
    if (e == 0) continue;
    result = multiply(g, result, power(g, phi.image(b), Integer(e.get_num())));
  }
  return result;
}

/// outer o inner. Requires inner to map the lattice into itself.
inline Endomorphism compose(const Endomorphism& outer, const Endomorphism& inner) {
  if (!(outer.group() == inner.group()))
    throw std::invalid_argument("compose: endomorphisms of different groups");
  std::vector<GroupElement> images;
  for (const auto& x : inner.images()) images.push_back(evaluate_on_lattice(outer, x));
  return Endomorphism(outer.group_ptr(), std::move(images));
}

/// Sampled check of phi(xy) = phi(x) phi(y) on lattice elements: every ordered
/// pair of basis elements and their inverses, then sample_count random pairs
/// with coordinates in [-5, 5].
inline CheckReport validate_homomorphism(const Endomorphism& phi, std::size_t sample_count,
                                         std::uint64_t seed) {
  if (sample_count == 0) throw std::invalid_argument("sample_count must be positive");
  const GroupPresentation& g = phi.group();
  CheckReport report;
  auto check = [&](const GroupElement& x, const GroupElement& y) {
    ++report.checks;
    GroupElement lhs = evaluate_on_lattice(phi, multiply(g, x, y));
    GroupElement rhs = multiply(g, evaluate_on_lattice(phi, x), evaluate_on_lattice(phi, y));
    if (lhs != rhs)
      report.fail("phi(xy) != phi(x)phi(y) for x=" + to_string(x) + ", y=" + to_string(y) +
                  ": " + to_string(lhs) + " vs " + to_string(rhs));
  };

  std::vector<GroupElement> generators;
  for (const auto& b : g.basis()) {
    generators.push_back(g.basis_element(b));
    generators.push_back(inverse(g, g.basis_element(b)));
  }
  for (const auto& x : generators)
    for (const auto& y : generators) {
      check(x, y);
      if (!report.passed) return report;
    }

  CoordinateSampler sampler(seed);
  for (std::size_t s = 0; s < sample_count && report.passed; ++s) {
    GroupElement x = sampler.lattice_element(g, 5);
    GroupElement y = sampler.lattice_element(g, 5);
    check(x, y);
  }
  return report;
}

/// det(I - phi_*) = prod_i det(I - M_i); phi_* is block triangular with the
/// layer matrices on its diagonal.
inline Rational det_i_minus_differential(const Endomorphism& phi) {
  Rational product = 1;
  for (const auto& m : layer_matrices(phi)) product *= det(identity_minus(m));
  return product;
}

/// Some M_i has eigenvalue 1, detected as det(I - M_i) = 0.
inline bool has_eigenvalue_one(const Endomorphism& phi) {
  for (const auto& m : layer_matrices(phi))
    if (det(identity_minus(m)) == 0) return true;
  return false;
}

}  // namespace nilfix
