#pragma once

// JSON reading and writing for presentations, endomorphisms, n-valued maps,
// twisted setups and reports. Indices in JSON are 1-based; rationals are
// strings "p/q" or "p" (plain JSON integers are accepted on input).

#include "nilfix/endomorphism.hpp"
#include "nilfix/malcev_group.hpp"
#include "nilfix/nvalued_map.hpp"
#include "nilfix/torus_oracle.hpp"
#include "nilfix/twisted_conjugacy.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

namespace nilfix::io {

using json = nlohmann::json;

/// Malformed input: syntax errors, missing keys, wrong types, bad numbers.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing key \"" + key + "\"");
  return *it;
}

inline const json& require_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  return j;
}

inline std::size_t to_index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw InputError(where + ": expected a positive integer");
  return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace detail

inline Rational rational_from_json(const json& j, const std::string& where = "rational") {
  if (j.is_number_integer()) return Rational(Integer(j.dump(), 10));
  if (!j.is_string()) throw InputError(where + ": expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline Integer integer_from_json(const json& j, const std::string& where = "integer") {
  Rational q = rational_from_json(j, where);
  if (!is_integer(q)) throw InputError(where + ": expected an integer, got " + q.get_str());
  return q.get_num();
}

inline json to_json(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// Groups

inline GroupPresentation presentation_from_json(const json& j) {
  const std::string where = "group";
  if (!j.is_object()) throw InputError(where + ": expected an object");
  if (auto it = j.find("builtin"); it != j.end()) {
    if (!it->is_string()) throw InputError(where + ": \"builtin\" must be a string");
    std::string name = it->get<std::string>();
    if (name == "abelian" && j.contains("rank"))
      name = "abelian(" + std::to_string(detail::to_index(j["rank"], where + ".rank")) + ")";
    return builtin(name);
  }
  const std::size_t c = detail::to_index(detail::require(j, "class", where), where + ".class");
  const json& ranks_json = detail::require_array(detail::require(j, "ranks", where), where + ".ranks");
  if (ranks_json.size() != c) throw InputError(where + ": \"ranks\" length differs from \"class\"");
  std::vector<std::size_t> ranks;
  for (const auto& r : ranks_json) ranks.push_back(detail::to_index(r, where + ".ranks"));

  std::vector<LawEntry> law;
  if (auto it = j.find("law"); it != j.end()) {
    detail::require_array(*it, where + ".law");
    for (std::size_t e = 0; e < it->size(); ++e) {
      const json& entry = (*it)[e];
      const std::string ew = where + ".law[" + std::to_string(e) + "]";
      LawEntry le;
      le.target = {detail::to_index(detail::require(entry, "layer", ew), ew + ".layer") - 1,
                   detail::to_index(detail::require(entry, "coordinate", ew), ew + ".coordinate") - 1};
      const json& terms = detail::require_array(detail::require(entry, "terms", ew), ew + ".terms");
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tw = ew + ".terms[" + std::to_string(t) + "]";
        Monomial mono;
        mono.coefficient = rational_from_json(detail::require(terms[t], "coeff", tw), tw + ".coeff");
        auto read_vars = [&](const char* key, std::vector<VariablePower>& out) {
          auto vit = terms[t].find(key);
          if (vit == terms[t].end()) return;
          detail::require_array(*vit, tw + "." + key);
          for (const auto& v : *vit) {
            if (!v.is_array() || v.size() != 3)
              throw InputError(tw + "." + key + ": expected [layer, index, exp] triples");
            const std::size_t exp = detail::to_index(v[2], tw + "." + key + " exponent");
            out.push_back({{detail::to_index(v[0], tw) - 1, detail::to_index(v[1], tw) - 1},
                           static_cast<unsigned>(exp)});
          }
        };
        read_vars("x", mono.x);
        read_vars("y", mono.y);
        le.polynomial.terms.push_back(std::move(mono));
      }
      law.push_back(std::move(le));
    }
  }
  return GroupPresentation(std::move(ranks), law);
}

inline json to_json(const GroupPresentation& g) {
  json law = json::array();
  for (const auto& b : g.basis()) {
    const Polynomial& p = g.law(b);
    if (p.is_zero()) continue;
    json terms = json::array();
    for (const auto& t : p.terms) {
      auto vars = [](const std::vector<VariablePower>& vs) {
        json a = json::array();
        for (const auto& v : vs)
          a.push_back({v.variable.layer + 1, v.variable.position + 1, v.exponent});
        return a;
      };
      terms.push_back({{"coeff", to_json(t.coefficient)}, {"x", vars(t.x)}, {"y", vars(t.y)}});
    }
    law.push_back({{"layer", b.layer + 1}, {"coordinate", b.position + 1}, {"terms", terms}});
  }
  return {{"class", g.nilpotency_class()}, {"ranks", g.ranks()}, {"law", law}};
}

inline GroupElement element_from_json(const json& j, const GroupPresentation& g,
                                      const std::string& where = "element") {
  detail::require_array(j, where);
  if (j.size() != g.nilpotency_class())
    throw InputError(where + ": expected " + std::to_string(g.nilpotency_class()) + " layers");
  std::vector<std::vector<Rational>> layers;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string lw = where + "[" + std::to_string(i) + "]";
    detail::require_array(j[i], lw);
    if (j[i].size() != g.rank(i))
      throw InputError(lw + ": expected " + std::to_string(g.rank(i)) + " coordinates");
    std::vector<Rational> layer;
    for (const auto& q : j[i]) layer.push_back(rational_from_json(q, lw));
    layers.push_back(std::move(layer));
  }
  return GroupElement(std::move(layers));
}

inline json to_json(const GroupElement& x) {
  json out = json::array();
  for (const auto& layer : x.layers()) {
    json l = json::array();
    for (const auto& q : layer) l.push_back(to_json(q));
    out.push_back(std::move(l));
  }
  return out;
}

/// {"images": [{"basis": [i, j], "value": [[...], ...]}, ...]}; every basis
/// element needs exactly one image.
inline Endomorphism endomorphism_from_json(const json& j,
                                           const std::shared_ptr<const GroupPresentation>& g,
                                           const std::string& where = "endomorphism") {
  const json& images = detail::require_array(detail::require(j, "images", where), where + ".images");
  const auto order = g->basis();
  std::vector<std::optional<GroupElement>> slots(order.size());
  for (std::size_t e = 0; e < images.size(); ++e) {
    const std::string ew = where + ".images[" + std::to_string(e) + "]";
    const json& basis = detail::require(images[e], "basis", ew);
    if (!basis.is_array() || basis.size() != 2) throw InputError(ew + ".basis: expected [layer, index]");
    BasisIndex b{detail::to_index(basis[0], ew) - 1, detail::to_index(basis[1], ew) - 1};
    if (!g->in_range(b)) throw InputError(ew + ".basis: " + basis_label(b) + " out of range");
    auto& slot = slots[g->flat_index(b)];
    if (slot) throw InputError(ew + ": duplicate image for " + basis_label(b));
    slot = element_from_json(detail::require(images[e], "value", ew), *g, ew + ".value");
  }
  std::vector<GroupElement> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!slots[k]) throw InputError(where + ": missing image for " + basis_label(order[k]));
    out.push_back(std::move(*slots[k]));
  }
  return Endomorphism(g, std::move(out));
}

inline json to_json(const Endomorphism& phi) {
  json images = json::array();
  for (const auto& b : phi.group().basis())
    images.push_back({{"basis", {b.layer + 1, b.position + 1}}, {"value", to_json(phi.image(b))}});
  return {{"images", images}};
}

inline AffineNValuedMap map_from_json(const json& j) {
  auto g = std::make_shared<const GroupPresentation>(presentation_from_json(detail::require(j, "group", "map")));
  const json& lifts = detail::require_array(detail::require(j, "lifts", "map"), "map.lifts");
  std::vector<AffineLift> out;
  for (std::size_t i = 0; i < lifts.size(); ++i) {
    const std::string w = "map.lifts[" + std::to_string(i) + "]";
    out.push_back({element_from_json(detail::require(lifts[i], "translation", w), *g, w + ".translation"),
                   endomorphism_from_json(detail::require(lifts[i], "endomorphism", w), g,
                                          w + ".endomorphism")});
  }
  return AffineNValuedMap(g, std::move(out));
}

inline json to_json(const AffineNValuedMap& m) {
  json lifts = json::array();
  for (const auto& l : m.lifts())
    lifts.push_back({{"translation", to_json(l.translation)}, {"endomorphism", to_json(l.linear)}});
  return {{"group", to_json(m.group())}, {"lifts", lifts}};
}

// ---------------------------------------------------------------------------
// Twisted setups

template <class T>
Matrix<T> matrix_from_json(const json& j, const std::string& where) {
  detail::require_array(j, where);
  if (j.empty()) throw InputError(where + ": empty matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = detail::require_array(j[0], where).size();
  std::vector<T> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw InputError(where + ": ragged matrix");
    for (const auto& v : row) {
      if constexpr (std::is_same_v<T, Integer>)
        entries.push_back(integer_from_json(v, where));
      else
        entries.push_back(rational_from_json(v, where));
    }
  }
  return Matrix<T>(rows, cols, std::move(entries));
}

template <class T>
json to_json(const Matrix<T>& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c).get_str());
    out.push_back(std::move(row));
  }
  return out;
}

inline TwistedSetup twisted_setup_from_json(const json& j) {
  const json& layers = detail::require_array(detail::require(j, "layers", "setup"), "setup.layers");
  TwistedSetup s;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string w = "setup.layers[" + std::to_string(i) + "]";
    s.layers.push_back({matrix_from_json<Integer>(detail::require(layers[i], "B", w), w + ".B"),
                        matrix_from_json<Rational>(detail::require(layers[i], "M", w), w + ".M")});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Reports

/// Integers as JSON numbers when they fit in 64 bits, strings otherwise.
inline json count_to_json(const Integer& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

inline ExtendedCount extended_from_json(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "infinite") return ExtendedCount::infinite();
  return ExtendedCount(integer_from_json(j, where));
}

inline json to_json(const ComponentReport& c) {
  json orbit = json::array();
  for (auto i : c.orbit) orbit.push_back(i + 1);
  return {{"orbit", orbit},
          {"det", to_json(c.det_value)},
          {"R", c.R_component.to_string()},
          {"N", count_to_json(c.N_component)},
          {"index_sign", c.index_sign}};
}

inline json to_json(const MapReport& r) {
  json components = json::array();
  for (const auto& c : r.components) components.push_back(to_json(c));
  return {{"reidemeister", r.reidemeister.to_string()},
          {"nielsen", count_to_json(r.nielsen)},
          {"components", components}};
}

inline MapReport map_report_from_json(const json& j) {
  MapReport r;
  r.reidemeister = extended_from_json(detail::require(j, "reidemeister", "report"), "report.reidemeister");
  r.nielsen = integer_from_json(detail::require(j, "nielsen", "report"), "report.nielsen");
  const json& comps = detail::require_array(detail::require(j, "components", "report"), "report.components");
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const std::string w = "report.components[" + std::to_string(k) + "]";
    ComponentReport c;
    for (const auto& i : detail::require_array(detail::require(comps[k], "orbit", w), w + ".orbit"))
      c.orbit.push_back(detail::to_index(i, w + ".orbit") - 1);
    if (c.orbit.empty()) throw InputError(w + ": empty orbit");
    c.representative = *std::min_element(c.orbit.begin(), c.orbit.end());
    c.det_value = rational_from_json(detail::require(comps[k], "det", w), w + ".det");
    c.R_component = extended_from_json(detail::require(comps[k], "R", w), w + ".R");
    c.N_component = integer_from_json(detail::require(comps[k], "N", w), w + ".N");
    const json& s = detail::require(comps[k], "index_sign", w);
    if (!s.is_number_integer()) throw InputError(w + ".index_sign: expected -1, 0 or 1");
    c.index_sign = s.get<int>();
    r.components.push_back(std::move(c));
  }
  return r;
}

inline json to_json(const TorusFixedPoint& p) {
  json coords = json::array(), witness = json::array();
  for (const auto& q : p.coordinates) coords.push_back(to_json(q));
  for (const auto& z : p.witness) witness.push_back(z.get_str());
  return {{"point", coords}, {"lift", p.lift_index + 1}, {"witness", witness}};
}

inline json to_json(const CheckReport& r) {
  json out = {{"passed", r.passed}, {"checks", r.checks}};
  if (!r.passed) out["failure"] = r.failure;
  return out;
}

inline json to_json(const DisjointnessReport& r) {
  json violations = json::array();
  for (auto [i, j] : r.violations) violations.push_back({i + 1, j + 1});
  json out = {{"passed", r.passed},
              {"exact_pairs", r.exact_pairs},
              {"sampled_pairs", r.sampled_pairs},
              {"violations", violations}};
  if (!r.passed) out["failure"] = r.failure;
  return out;
}

// ---------------------------------------------------------------------------
// Files

/// Parses a JSON document; syntax errors become InputError with the byte
/// position reported by the parser.
inline json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str(), path);
}

}  // namespace nilfix::io
