#pragma once

// Nilpotent Lie groups in Malcev coordinates.
//
// An element is a tuple of per-layer rational vectors (x_1, ..., x_c). The
// group law is polynomial and layer-triangular:
//
//   (x * y)_i = x_i + y_i + p_i(x_1..x_{i-1}, y_1..y_{i-1}),   p_1 = 0.
//
// The lattice N consists of the elements with integer coordinates. All layer
// and position indices in this API are 0-based.

#include "nilfix/exact_linalg.hpp"

#include <compare>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace nilfix {

struct BasisIndex {
  std::size_t layer = 0;
  std::size_t position = 0;

  friend auto operator<=>(const BasisIndex&, const BasisIndex&) = default;
};

/// "a_{i,j}" with 1-based indices, as used in reports.
inline std::string basis_label(const BasisIndex& b) {
  return "a_{" + std::to_string(b.layer + 1) + "," + std::to_string(b.position + 1) + "}";
}

class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::vector<Rational>> layers) : layers_(std::move(layers)) {}

  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<Rational>& layer(std::size_t i) const { return layers_.at(i); }
  std::vector<Rational>& layer(std::size_t i) { return layers_.at(i); }
  const Rational& operator[](const BasisIndex& b) const { return layers_.at(b.layer).at(b.position); }
  Rational& operator[](const BasisIndex& b) { return layers_.at(b.layer).at(b.position); }
  const std::vector<std::vector<Rational>>& layers() const { return layers_; }

  bool is_identity() const {
    for (const auto& l : layers_)
      for (const auto& q : l)
        if (q != 0) return false;
    return true;
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  std::vector<std::vector<Rational>> layers_;
};

inline std::string to_string(const GroupElement& x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.layer_count(); ++i) {
    if (i) os << " | ";
    for (std::size_t j = 0; j < x.layer(i).size(); ++j) {
      if (j) os << ", ";
      os << x.layer(i)[j].get_str();
    }
  }
  os << ')';
  return os.str();
}

/// True iff every coordinate is an integer.
inline bool is_lattice_element(const GroupElement& x) {
  for (const auto& l : x.layers())
    for (const auto& q : l)
      if (!is_integer(q)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Polynomial group law.

struct VariablePower {
  BasisIndex variable;
  unsigned exponent = 1;

  friend bool operator==(const VariablePower&, const VariablePower&) = default;
};

/// coefficient * prod x_v^e * prod y_w^f
struct Monomial {
  Rational coefficient;
  std::vector<VariablePower> x;
  std::vector<VariablePower> y;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

namespace detail {
inline Rational pow(const Rational& base, unsigned e) {
  Rational out = 1;
  for (unsigned k = 0; k < e; ++k) out *= base;
  return out;
}
}  // namespace detail

struct Polynomial {
  std::vector<Monomial> terms;

  bool is_zero() const { return terms.empty(); }

  Rational evaluate(const GroupElement& x, const GroupElement& y) const {
    Rational sum = 0;
    for (const auto& t : terms) {
      Rational value = t.coefficient;
      for (const auto& v : t.x) value *= detail::pow(x[v.variable], v.exponent);
      for (const auto& v : t.y) value *= detail::pow(y[v.variable], v.exponent);
      sum += value;
    }
    return sum;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

struct LawEntry {
  BasisIndex target;
  Polynomial polynomial;
};

struct PresentationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class GroupPresentation {
 public:
  /// Throws PresentationError if a polynomial references a variable outside
  /// the strictly lower layers of its target, or an index is out of range.
  GroupPresentation(std::vector<std::size_t> ranks, const std::vector<LawEntry>& law)
      : ranks_(std::move(ranks)) {
    if (ranks_.empty()) throw PresentationError("presentation needs at least one layer");
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      if (ranks_[i] == 0)
        throw PresentationError("layer " + std::to_string(i + 1) + " has rank 0");
    law_.resize(ranks_.size());
    for (std::size_t i = 0; i < ranks_.size(); ++i) law_[i].resize(ranks_[i]);
    std::vector<std::vector<bool>> seen(ranks_.size());
    for (std::size_t i = 0; i < ranks_.size(); ++i) seen[i].assign(ranks_[i], false);

    for (const auto& entry : law) {
      const BasisIndex& t = entry.target;
      if (!in_range(t))
        throw PresentationError("law target " + basis_label(t) + " out of range");
      if (t.layer == 0)
        throw PresentationError("layer 1 coordinates are additive; no law allowed for " +
                                basis_label(t));
      if (seen[t.layer][t.position])
        throw PresentationError("duplicate law for " + basis_label(t));
      seen[t.layer][t.position] = true;
      for (const auto& term : entry.polynomial.terms)
        for (const auto* vars : {&term.x, &term.y})
          for (const auto& v : *vars) {
            if (!in_range(v.variable))
              throw PresentationError("variable " + basis_label(v.variable) + " out of range");
            if (v.variable.layer >= t.layer)
              throw PresentationError("law for " + basis_label(t) +
                                      " references non-lower variable " +
                                      basis_label(v.variable));
          }
      law_[t.layer][t.position] = entry.polynomial;
    }
  }

  std::size_t nilpotency_class() const { return ranks_.size(); }
  const std::vector<std::size_t>& ranks() const { return ranks_; }
  std::size_t rank(std::size_t layer) const { return ranks_.at(layer); }

  std::size_t dimension() const {
    std::size_t k = 0;
    for (auto r : ranks_) k += r;
    return k;
  }

  bool in_range(const BasisIndex& b) const {
    return b.layer < ranks_.size() && b.position < ranks_[b.layer];
  }

  const Polynomial& law(const BasisIndex& b) const { return law_.at(b.layer).at(b.position); }

  bool is_abelian() const {
    for (const auto& layer : law_)
      for (const auto& p : layer)
        if (!p.is_zero()) return false;
    return true;
  }

  /// Basis indices in canonical Malcev order.
  std::vector<BasisIndex> basis() const {
    std::vector<BasisIndex> out;
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      for (std::size_t j = 0; j < ranks_[i]; ++j) out.push_back({i, j});
    return out;
  }

  std::size_t flat_index(const BasisIndex& b) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < b.layer; ++i) k += ranks_[i];
    return k + b.position;
  }

  GroupElement identity() const {
    std::vector<std::vector<Rational>> layers;
    for (auto r : ranks_) layers.emplace_back(r, Rational(0));
    return GroupElement(std::move(layers));
  }

  GroupElement basis_element(const BasisIndex& b) const {
    GroupElement e = identity();
    e[b] = 1;
    return e;
  }

  /// Builds an element from a flat coordinate list in basis order.
  template <class Range>
  GroupElement element(const Range& flat) const {
    GroupElement e = identity();
    const auto order = basis();
    std::size_t k = 0;
    for (const auto& q : flat) {
      if (k >= order.size()) throw DimensionError("too many coordinates");
      e[order[k++]] = Rational(q);
    }
    if (k != order.size()) throw DimensionError("too few coordinates");
    return e;
  }

  GroupElement element(std::initializer_list<long> flat) const {
    return element<std::initializer_list<long>>(flat);
  }

  bool conforms(const GroupElement& x) const {
    if (x.layer_count() != ranks_.size()) return false;
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      if (x.layer(i).size() != ranks_[i]) return false;
    return true;
  }

  void require_conforming(const GroupElement& x) const {
    if (!conforms(x)) throw DimensionError("element " + to_string(x) + " does not fit the presentation");
  }

  friend bool operator==(const GroupPresentation&, const GroupPresentation&) = default;

 private:
  std::vector<std::size_t> ranks_;
  std::vector<std::vector<Polynomial>> law_;
};

// ---------------------------------------------------------------------------
// Group arithmetic.

inline GroupElement multiply(const GroupPresentation& g, const GroupElement& x,
                             const GroupElement& y) {
  g.require_conforming(x);
  g.require_conforming(y);
  GroupElement out = g.identity();
  for (const auto& b : g.basis()) {
    out[b] = x[b] + y[b];
    const Polynomial& p = g.law(b);
    if (!p.is_zero()) out[b] += p.evaluate(x, y);
  }
  return out;
}

/// Layer-triangular solve of x * y = 1: y_i = -x_i - p_i(x, y).
inline GroupElement inverse(const GroupPresentation& g, const GroupElement& x) {
  g.require_conforming(x);
  GroupElement y = g.identity();
  // p_i only reads lower layers of y, which are already final.
  for (const auto& b : g.basis()) {
    y[b] = -x[b];
    const Polynomial& p = g.law(b);
    if (!p.is_zero()) y[b] -= p.evaluate(x, y);
  }
  return y;
}

inline GroupElement power(const GroupPresentation& g, const GroupElement& x, const Integer& m) {
  GroupElement base = m < 0 ? inverse(g, x) : x;
  Integer e = abs(m);
  GroupElement result = g.identity();
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = multiply(g, result, base);
    e >>= 1;
    if (e > 0) base = multiply(g, base, base);
  }
  return result;
}

inline GroupElement power(const GroupPresentation& g, const GroupElement& x, long m) {
  return power(g, x, Integer(m));
}

/// x^{-1} y^{-1} x y
inline GroupElement commutator(const GroupPresentation& g, const GroupElement& x,
                               const GroupElement& y) {
  return multiply(g, multiply(g, multiply(g, inverse(g, x), inverse(g, y)), x), y);
}

/// Exponents e with x = prod_{(i,j) in basis order} a_{i,j}^{e_{i,j}}.
///
/// Peels basis elements off the left: once every coordinate before (i,j) is
/// zero, left-multiplying by a_{i,j}^{-e} clears (i,j) and leaves earlier
/// coordinates untouched, so e_{i,j} is the current (i,j) coordinate.
inline GroupElement malcev_exponents(const GroupPresentation& g, const GroupElement& x) {
  g.require_conforming(x);
  GroupElement rest = x;
  GroupElement exponents = g.identity();
  for (const auto& b : g.basis()) {
    const Rational e = rest[b];
    exponents[b] = e;
    if (e == 0) continue;
    GroupElement shift = g.identity();
    shift[b] = -e;
    rest = multiply(g, shift, rest);
  }
  if (!rest.is_identity())
    throw std::logic_error("Malcev factorization did not terminate at the identity");
  return exponents;
}

// ---------------------------------------------------------------------------
// Built-in presentations.

/// Z^k in R^k.
inline GroupPresentation abelian(std::size_t k) { return GroupPresentation({k}, {}); }

/// Ranks (2, 1) with p_{2,1}(x, y) = x_{1,1} y_{1,2}: (a, b, c) are the
/// entries (1,2), (2,3), (1,3) of a 3x3 upper unitriangular matrix.
inline GroupPresentation heisenberg() {
  Monomial m{Rational(1), {{{0, 0}, 1}}, {{{0, 1}, 1}}};
  return GroupPresentation({2, 1}, {LawEntry{{1, 0}, Polynomial{{m}}}});
}

/// "heisenberg", "abelian(k)" or "abelian" (rank 1).
inline GroupPresentation builtin(const std::string& name) {
  if (name == "heisenberg") return heisenberg();
  if (name == "abelian") return abelian(1);
  if (name.rfind("abelian(", 0) == 0 && name.size() > 9 && name.back() == ')') {
    std::string digits = name.substr(8, name.size() - 9);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      auto k = std::stoul(digits);
      if (k > 0) return abelian(k);
    }
  }
  throw PresentationError("unknown builtin group '" + name + "'");
}

// ---------------------------------------------------------------------------
// Sampled verification.

struct CheckReport {
  bool passed = true;
  std::size_t checks = 0;
  std::string failure;  // first counterexample, empty when passed

  void fail(std::string why) {
    if (passed) {
      passed = false;
      failure = std::move(why);
    }
  }
};

/// Portable deterministic sampling of integer coordinates in [-bound, bound].
class CoordinateSampler {
 public:
  explicit CoordinateSampler(std::uint64_t seed) : engine_(seed) {}

  long next(long bound) {
    return static_cast<long>(engine_() % static_cast<std::uint64_t>(2 * bound + 1)) - bound;
  }

  GroupElement lattice_element(const GroupPresentation& g, long bound) {
    GroupElement e = g.identity();
    for (const auto& b : g.basis()) e[b] = next(bound);
    return e;
  }

  /// Coordinates p/q with |p| <= bound and 1 <= q <= bound.
  GroupElement rational_element(const GroupPresentation& g, long bound) {
    GroupElement e = g.identity();
    for (const auto& b : g.basis()) {
      long den = 1 + static_cast<long>(engine_() % static_cast<std::uint64_t>(bound));
      e[b] = make_rational(next(bound), den);
    }
    return e;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Checks associativity, two-sided identity, two-sided inverse and lattice
/// closure on pseudo-random integer triples with coordinates in [-5, 5].
inline CheckReport check_group_axioms(const GroupPresentation& g, std::size_t sample_count,
                                      std::uint64_t seed) {
  if (sample_count == 0) throw std::invalid_argument("sample_count must be positive");
  CheckReport report;
  CoordinateSampler sampler(seed);
  const GroupElement e = g.identity();
  for (std::size_t s = 0; s < sample_count && report.passed; ++s) {
    GroupElement x = sampler.lattice_element(g, 5);
    GroupElement y = sampler.lattice_element(g, 5);
    GroupElement z = sampler.lattice_element(g, 5);
    ++report.checks;

    GroupElement xy = multiply(g, x, y);
    if (multiply(g, xy, z) != multiply(g, x, multiply(g, y, z))) {
      report.fail("associativity fails for x=" + to_string(x) + ", y=" + to_string(y) +
                  ", z=" + to_string(z));
      break;
    }
    if (multiply(g, x, e) != x || multiply(g, e, x) != x) {
      report.fail("identity is not two-sided at x=" + to_string(x));
      break;
    }
    GroupElement xi = inverse(g, x);
    if (!multiply(g, x, xi).is_identity() || !multiply(g, xi, x).is_identity()) {
      report.fail("inverse is not two-sided at x=" + to_string(x));
      break;
    }
    if (!is_lattice_element(xy))
      report.fail("lattice not closed under multiply: x=" + to_string(x) + ", y=" + to_string(y));
    else if (!is_lattice_element(xi))
      report.fail("lattice not closed under inverse: x=" + to_string(x));
  }
  return report;
}

}  // namespace nilfix
