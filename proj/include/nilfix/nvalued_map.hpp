#pragma once

// Affine n-valued maps on a nilmanifold N\G, given by a basic lifting
// (g_1 phi_1, ..., g_n phi_n) of affine maps x -> g_i phi_i(x) of G.
//
// A lattice element gamma acts on the lifting through
//
//   f_i o gamma = phi_i(gamma) o f_{sigma_gamma^{-1}(i)},
//
// which forces phi_i = phi_j for j = sigma_gamma^{-1}(i) and
// phi_i(gamma) = g_i phi_i(gamma) g_j^{-1} in N. The sigma-orbits are the
// irreducible components; each lift contributes |det(I - phi_i*)| to both
// the Reidemeister (with |0| = infinity) and the Nielsen number.

#include "nilfix/endomorphism.hpp"
#include "nilfix/exact_linalg.hpp"
#include "nilfix/malcev_group.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace nilfix {

struct AffineLift {
  GroupElement translation;
  Endomorphism linear;
};

class AffineNValuedMap {
 public:
  AffineNValuedMap(std::shared_ptr<const GroupPresentation> group, std::vector<AffineLift> lifts)
      : group_(std::move(group)), lifts_(std::move(lifts)) {
    if (!group_) throw std::invalid_argument("n-valued map without a group");
    if (lifts_.empty()) throw std::invalid_argument("n-valued map needs at least one lift");
    for (const auto& l : lifts_) {
      group_->require_conforming(l.translation);
      if (!(l.linear.group() == *group_))
        throw std::invalid_argument("lift endomorphism belongs to a different group");
    }
  }

  const GroupPresentation& group() const { return *group_; }
  const std::shared_ptr<const GroupPresentation>& group_ptr() const { return group_; }
  std::size_t size() const { return lifts_.size(); }
  const AffineLift& lift(std::size_t i) const { return lifts_.at(i); }
  const std::vector<AffineLift>& lifts() const { return lifts_; }

 private:
  std::shared_ptr<const GroupPresentation> group_;
  std::vector<AffineLift> lifts_;
};

// ---------------------------------------------------------------------------
// sigma data

/// The action of one lattice element gamma on the basic lifting.
struct LiftAction {
  std::vector<std::size_t> source;         // source[i] = sigma_gamma^{-1}(i)
  std::vector<GroupElement> translations;  // translations[i] = phi_i(gamma)

  /// sigma_gamma as an array: permutation()[j] = sigma_gamma(j).
  std::vector<std::size_t> permutation() const {
    std::vector<std::size_t> p(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) p[source[i]] = i;
    return p;
  }

  friend bool operator==(const LiftAction&, const LiftAction&) = default;
};

struct SigmaData {
  std::vector<BasisIndex> generators;  // Malcev basis, canonical order
  std::vector<LiftAction> actions;     // one per generator
};

class SigmaError : public std::runtime_error {
 public:
  enum class Kind { no_match, ambiguous_match, not_bijective };

  SigmaError(Kind kind, std::string element, std::size_t lift, const std::string& what)
      : std::runtime_error(what), kind(kind), element(std::move(element)), lift(lift) {}

  Kind kind;
  std::string element;  // generator label or coordinates
  std::size_t lift;     // 0-based
};

inline const char* to_string(SigmaError::Kind k) {
  switch (k) {
    case SigmaError::Kind::no_match: return "no match";
    case SigmaError::Kind::ambiguous_match: return "ambiguous match";
    case SigmaError::Kind::not_bijective: return "not bijective";
  }
  return "?";
}

/// Matching data of gamma in N: for each lift i the unique j with
/// phi_j = phi_i and g_i phi_i(gamma) g_j^{-1} in N.
inline LiftAction act(const AffineNValuedMap& m, const GroupElement& gamma,
                      const std::string& label) {
  const GroupPresentation& g = m.group();
  const std::size_t n = m.size();
  LiftAction action;
  action.source.resize(n);
  action.translations.resize(n);
  std::vector<bool> hit(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const AffineLift& li = m.lift(i);
    GroupElement moved = multiply(g, li.translation, evaluate_on_lattice(li.linear, gamma));
    std::optional<std::size_t> match;
    for (std::size_t j = 0; j < n; ++j) {
      const AffineLift& lj = m.lift(j);
      if (!(lj.linear == li.linear)) continue;
      GroupElement delta = multiply(g, moved, inverse(g, lj.translation));
      if (!is_lattice_element(delta)) continue;
      if (match)
        throw SigmaError(SigmaError::Kind::ambiguous_match, label, i,
                         "ambiguous match for " + label + " at lift " + std::to_string(i + 1) +
                             ": lifts " + std::to_string(*match + 1) + " and " +
                             std::to_string(j + 1));
      match = j;
      action.translations[i] = std::move(delta);
    }
    if (!match)
      throw SigmaError(SigmaError::Kind::no_match, label, i,
                       "no match for " + label + " at lift " + std::to_string(i + 1) +
                           ": g_i phi_i(gamma) = " + to_string(moved) +
                           " is not a lattice translate of any lift with the same linear part");
    if (hit[*match])
      throw SigmaError(SigmaError::Kind::not_bijective, label, i,
                       "sigma for " + label + " is not a bijection: lift " +
                           std::to_string(*match + 1) + " matched twice");
    hit[*match] = true;
    action.source[i] = *match;
  }
  return action;
}

inline LiftAction act(const AffineNValuedMap& m, const GroupElement& gamma) {
  return act(m, gamma, to_string(gamma));
}

/// sigma data on the Malcev basis, which generates N.
inline SigmaData compute_sigma(const AffineNValuedMap& m) {
  SigmaData s;
  const GroupPresentation& g = m.group();
  for (const auto& b : g.basis()) {
    s.generators.push_back(b);
    s.actions.push_back(act(m, g.basis_element(b), basis_label(b)));
  }
  return s;
}

/// Components of {0..n-1} under all generator permutations, each sorted,
/// ordered by smallest member.
inline std::vector<std::vector<std::size_t>> sigma_orbits(const SigmaData& s, std::size_t n) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& a : s.actions) {
    if (a.source.size() != n) throw DimensionError("sigma data does not match lift count");
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t x = find(i), y = find(a.source[i]);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  }
  std::vector<std::vector<std::size_t>> orbits;
  std::vector<std::optional<std::size_t>> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    if (!slot[r]) {
      slot[r] = orbits.size();
      orbits.emplace_back();
    }
    orbits[*slot[r]].push_back(i);
  }
  return orbits;
}

// ---------------------------------------------------------------------------
// Reidemeister and Nielsen numbers

struct ComponentReport {
  std::vector<std::size_t> orbit;  // 0-based lift indices
  std::size_t representative = 0;
  Rational det_value;
  ExtendedCount R_component;
  Integer N_component;
  int index_sign = 0;

  friend bool operator==(const ComponentReport&, const ComponentReport&) = default;
};

struct MapReport {
  ExtendedCount reidemeister;
  Integer nielsen;
  std::vector<ComponentReport> components;

  friend bool operator==(const MapReport&, const MapReport&) = default;
};

/// sum_i |det(I - phi_i*)|_inf. Refuses maps whose sigma data is undefined.
inline ExtendedCount reidemeister(const AffineNValuedMap& m) {
  compute_sigma(m);
  ExtendedRational sum(Rational(0));
  for (const auto& l : m.lifts()) sum += abs_inf(det_i_minus_differential(l.linear));
  return to_count(sum);
}

/// sum_i |det(I - phi_i*)|.
inline Integer nielsen(const AffineNValuedMap& m) {
  compute_sigma(m);
  Rational sum = 0;
  for (const auto& l : m.lifts()) sum += abs(det_i_minus_differential(l.linear));
  if (!is_integer(sum)) throw std::logic_error("non-integral Nielsen number " + sum.get_str());
  return sum.get_num();
}

/// One report per sigma-orbit. Lifts in one orbit share their linear part,
/// so the orbit contributes orbit_size * |det(I - phi_*)| of the representative.
inline std::vector<ComponentReport> component_reports(const AffineNValuedMap& m) {
  SigmaData s = compute_sigma(m);
  std::vector<ComponentReport> out;
  for (auto& orbit : sigma_orbits(s, m.size())) {
    ComponentReport c;
    c.representative = orbit.front();
    const Endomorphism& phi = m.lift(c.representative).linear;
    for (auto i : orbit)
      if (!(m.lift(i).linear == phi))
        throw std::logic_error("sigma-orbit mixes different linear parts");
    c.det_value = det_i_minus_differential(phi);
    const Rational size(static_cast<unsigned long>(orbit.size()));
    c.R_component = to_count(ExtendedRational(size) * abs_inf(c.det_value));
    Rational n_comp = size * abs(c.det_value);
    if (!is_integer(n_comp))
      throw std::logic_error("non-integral Nielsen contribution " + n_comp.get_str());
    c.N_component = n_comp.get_num();
    c.index_sign = sign(c.det_value);
    c.orbit = std::move(orbit);
    out.push_back(std::move(c));
  }
  return out;
}

/// Full analysis. The totals are summed per lift and checked against the
/// per-component regrouping.
inline MapReport analyze(const AffineNValuedMap& m) {
  MapReport r;
  r.components = component_reports(m);
  r.reidemeister = reidemeister(m);
  r.nielsen = nielsen(m);
  ExtendedCount r_sum(0);
  Integer n_sum = 0;
  for (const auto& c : r.components) {
    r_sum += c.R_component;
    n_sum += c.N_component;
  }
  if (r_sum != r.reidemeister || n_sum != r.nielsen)
    throw std::logic_error("component totals disagree with the per-lift sums");
  return r;
}

// ---------------------------------------------------------------------------
// Validation

struct DisjointnessReport {
  bool passed = true;
  std::size_t exact_pairs = 0;    // equal linear parts, decided exactly
  std::size_t sampled_pairs = 0;  // different linear parts, sampled evidence
  std::vector<std::pair<std::size_t, std::size_t>> violations;  // 0-based
  std::string failure;
};

/// The lifts must land in the orbit configuration space: for i != j the
/// points g_i phi_i(x) and g_j phi_j(x) never differ by a lattice element.
/// With equal linear parts this reduces to g_i g_j^{-1} not in N; otherwise
/// it is checked on sample_count lattice points with coordinates in [-5, 5].
inline DisjointnessReport validate_nvalued(const AffineNValuedMap& m, std::size_t sample_count,
                                           std::uint64_t seed) {
  const GroupPresentation& g = m.group();
  DisjointnessReport report;
  CoordinateSampler sampler(seed);
  std::vector<GroupElement> samples;
  for (std::size_t s = 0; s < sample_count; ++s) samples.push_back(sampler.lattice_element(g, 5));

  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const AffineLift& a = m.lift(i);
      const AffineLift& b = m.lift(j);
      if (a.linear == b.linear) {
        ++report.exact_pairs;
        GroupElement diff = multiply(g, a.translation, inverse(g, b.translation));
        if (is_lattice_element(diff)) {
          report.violations.emplace_back(i, j);
          if (report.passed)
            report.failure = "lifts " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                             " coincide on the nilmanifold: g_i g_j^{-1} = " + to_string(diff);
          report.passed = false;
        }
        continue;
      }
      ++report.sampled_pairs;
      for (const auto& x : samples) {
        GroupElement yi = multiply(g, a.translation, evaluate_on_lattice(a.linear, x));
        GroupElement yj = multiply(g, b.translation, evaluate_on_lattice(b.linear, x));
        GroupElement diff = multiply(g, yi, inverse(g, yj));
        if (is_lattice_element(diff)) {
          report.violations.emplace_back(i, j);
          if (report.passed)
            report.failure = "lifts " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                             " meet over x = " + to_string(x);
          report.passed = false;
          break;
        }
      }
    }
  return report;
}

/// Checks that gamma -> (phi_1(gamma), ..., phi_n(gamma); sigma_gamma) is a
/// homomorphism into N^n x| S_n: recomputes the matching data at products
/// gamma*delta and compares with sigma_gamma o sigma_delta and
/// phi_i(gamma delta) = phi_i(gamma) phi_{sigma_gamma^{-1}(i)}(delta).
/// Covers every ordered pair of generators and their inverses, then
/// sample_count random pairs of lattice elements with coordinates in [-3, 3].
inline CheckReport sigma_cocycle_check(const SigmaData& s, const AffineNValuedMap& m,
                                       std::size_t sample_count, std::uint64_t seed) {
  const GroupPresentation& g = m.group();
  CheckReport report;
  const std::size_t n = m.size();

  struct Labeled {
    GroupElement element;
    std::string label;
    LiftAction action;
  };
  std::vector<Labeled> generators;
  for (std::size_t k = 0; k < s.generators.size(); ++k) {
    const BasisIndex b = s.generators[k];
    generators.push_back({g.basis_element(b), basis_label(b), s.actions[k]});
    GroupElement inv = inverse(g, g.basis_element(b));
    generators.push_back({inv, basis_label(b) + "^-1", act(m, inv, basis_label(b) + "^-1")});
  }

  auto check = [&](const Labeled& x, const Labeled& y) {
    ++report.checks;
    LiftAction xy = act(m, multiply(g, x.element, y.element), x.label + "*" + y.label);
    for (std::size_t i = 0; i < n; ++i) {
      // sigma_{xy}^{-1}(i) = sigma_y^{-1}(sigma_x^{-1}(i))
      if (xy.source[i] != y.action.source[x.action.source[i]]) {
        report.fail("sigma(" + x.label + "*" + y.label + ") != sigma(" + x.label + ") o sigma(" +
                    y.label + ") at lift " + std::to_string(i + 1));
        return;
      }
      GroupElement expected =
          multiply(g, x.action.translations[i], y.action.translations[x.action.source[i]]);
      if (xy.translations[i] != expected) {
        report.fail("phi_" + std::to_string(i + 1) + "(" + x.label + "*" + y.label +
                    ") = " + to_string(xy.translations[i]) + " but the cocycle gives " +
                    to_string(expected));
        return;
      }
    }
  };

  try {
    for (const auto& x : generators)
      for (const auto& y : generators) {
        check(x, y);
        if (!report.passed) return report;
      }
    CoordinateSampler sampler(seed);
    for (std::size_t k = 0; k < sample_count && report.passed; ++k) {
      GroupElement a = sampler.lattice_element(g, 3);
      GroupElement b = sampler.lattice_element(g, 3);
      check(Labeled{a, to_string(a), act(m, a)}, Labeled{b, to_string(b), act(m, b)});
    }
  } catch (const SigmaError& e) {
    report.fail(e.what());
  }
  return report;
}

}  // namespace nilfix
