#pragma once

// Command driver shared by the nilfix executable and the test suites.
//
// Exit status: 0 success, 1 validation failure (semantic), 2 malformed input.

#include "nilfix/json_io.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace nilfix::cli {

enum class Command { validate, analyze, fixed_points, oracle };
enum class Format { text, json };

struct AnalysisRequest {
  std::string input;
  Command command = Command::analyze;
  Format format = Format::text;
  std::size_t sample_count = 200;
  std::uint64_t seed = 42;
  int box_bound = 6;
  bool skip_singular = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_malformed = 2;

namespace detail {

using io::json;

inline void emit(std::ostream& out, Format format, const json& j, const std::string& text) {
  if (format == Format::json)
    out << j.dump(2) << '\n';
  else
    out << text;
}

inline std::string orbit_string(const std::vector<std::size_t>& orbit) {
  std::string s = "{";
  for (std::size_t k = 0; k < orbit.size(); ++k) s += (k ? "," : "") + std::to_string(orbit[k] + 1);
  return s + "}";
}

inline int run_validate(const AnalysisRequest& req, const json& doc, std::ostream& out) {
  AffineNValuedMap m = io::map_from_json(doc);
  json report;
  std::string text;
  bool ok = true;

  CheckReport axioms = check_group_axioms(m.group(), req.sample_count, req.seed);
  report["group_axioms"] = io::to_json(axioms);
  text += std::string("group axioms:        ") + (axioms.passed ? "pass" : "FAIL: " + axioms.failure) + "\n";
  ok = ok && axioms.passed;

  json homs = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    CheckReport h = validate_homomorphism(m.lift(i).linear, req.sample_count, req.seed);
    homs.push_back(io::to_json(h));
    text += "homomorphism lift " + std::to_string(i + 1) + ": " + (h.passed ? "pass" : "FAIL: " + h.failure) + "\n";
    ok = ok && h.passed;
  }
  report["homomorphisms"] = homs;

  DisjointnessReport d = validate_nvalued(m, req.sample_count, req.seed);
  report["disjointness"] = io::to_json(d);
  text += std::string("disjointness:        ") + (d.passed ? "pass" : "FAIL: " + d.failure) +
          " (exact pairs " + std::to_string(d.exact_pairs) + ", sampled pairs " +
          std::to_string(d.sampled_pairs) + ")\n";
  ok = ok && d.passed;

  try {
    SigmaData s = compute_sigma(m);
    json orbits = json::array();
    std::string orbit_text;
    for (const auto& o : sigma_orbits(s, m.size())) {
      json a = json::array();
      for (auto i : o) a.push_back(i + 1);
      orbits.push_back(a);
      orbit_text += orbit_string(o) + " ";
    }
    report["sigma"] = {{"passed", true}, {"orbits", orbits}};
    text += "sigma:               pass, orbits " + orbit_text + "\n";
    CheckReport cocycle = sigma_cocycle_check(s, m, req.sample_count, req.seed);
    report["cocycle"] = io::to_json(cocycle);
    text += std::string("sigma cocycle:       ") + (cocycle.passed ? "pass" : "FAIL: " + cocycle.failure) + "\n";
    ok = ok && cocycle.passed;
  } catch (const SigmaError& e) {
    report["sigma"] = {{"passed", false},
                       {"kind", to_string(e.kind)},
                       {"element", e.element},
                       {"lift", e.lift + 1},
                       {"failure", e.what()}};
    text += std::string("sigma:               FAIL: ") + e.what() + "\n";
    ok = false;
  }
  report["passed"] = ok;
  emit(out, req.format, report, text);
  return ok ? exit_ok : exit_invalid;
}

inline int run_analyze(const AnalysisRequest& req, const json& doc, std::ostream& out) {
  AffineNValuedMap m = io::map_from_json(doc);
  MapReport r = analyze(m);
  std::string text = "R(f) = " + r.reidemeister.to_string() + "\nN(f) = " + r.nielsen.get_str() +
                     "\ncomponents:\n";
  for (const auto& c : r.components)
    text += "  orbit " + orbit_string(c.orbit) + "  det(I - phi_*) = " + c.det_value.get_str() +
            "  R = " + c.R_component.to_string() + "  N = " + c.N_component.get_str() +
            "  index sign = " + std::to_string(c.index_sign) + "\n";
  emit(out, req.format, io::to_json(r), text);
  return exit_ok;
}

inline int run_fixed_points(const AnalysisRequest& req, const json& doc, std::ostream& out) {
  AffineNValuedMap m = io::map_from_json(doc);
  auto points = enumerate_fixed_points(m, req.skip_singular);
  json list = json::array();
  std::string text;
  for (const auto& p : points) {
    list.push_back(io::to_json(p));
    text += "(";
    for (std::size_t k = 0; k < p.coordinates.size(); ++k)
      text += (k ? ", " : "") + p.coordinates[k].get_str();
    text += ")  lift " + std::to_string(p.lift_index + 1) + "  z = (";
    for (std::size_t k = 0; k < p.witness.size(); ++k) text += (k ? ", " : "") + p.witness[k].get_str();
    text += ")\n";
  }
  Integer n = nielsen(m);
  json report = {{"fixed_points", list}, {"count", points.size()}, {"nielsen", io::count_to_json(n)}};
  text += std::to_string(points.size()) + " fixed points, N(f) = " + n.get_str() + "\n";
  emit(out, req.format, report, text);
  return exit_ok;
}

inline int run_oracle(const AnalysisRequest& req, const json& doc, std::ostream& out) {
  if (doc.contains("layers")) {
    TwistedSetup s = io::twisted_setup_from_json(doc);
    s.validate();
    json layers = json::array();
    std::string text;
    bool agree = true;
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
      const LayerDatum& l = s.layers[i];
      ExtendedCount formula = reidemeister_abelian(l);
      json entry = {{"layer", i + 1}, {"formula", formula.to_string()}};
      text += "layer " + std::to_string(i + 1) + ": formula " + formula.to_string();
      if (formula.is_finite() && l.rank() <= 3) {
        Integer coset = oracle_abelian_classes(l);
        Integer residue = brute_force_reidemeister_z_k(l.B, l.M);
        entry["coset_oracle"] = coset.get_str();
        entry["residue_oracle"] = residue.get_str();
        text += ", coset oracle " + coset.get_str() + ", residue oracle " + residue.get_str();
        agree = agree && coset == formula.value() && residue == formula.value();
      }
      text += "\n";
      layers.push_back(entry);
    }
    ExtendedCount product = reidemeister_product(s);
    text += "R(phi) = " + product.to_string() + "\n";
    json report = {{"layers", layers}, {"reidemeister", product.to_string()}, {"agree", agree}};
    if (doc.contains("index")) {
      ExtendedCount full = reidemeister_full(io::integer_from_json(doc["index"], "setup.index"), s);
      report["full"] = full.to_string();
      text += "[N:H] |det(I - M)|_inf = " + full.to_string() + "\n";
      agree = agree && full == product;
      report["agree"] = agree;
    }
    emit(out, req.format, report, text);
    return agree ? exit_ok : exit_invalid;
  }

  // Nilpotent census: {"group": ..., "endomorphism": ...} or a 1-valued map.
  std::shared_ptr<const GroupPresentation> g;
  std::optional<Endomorphism> phi;
  if (doc.contains("endomorphism")) {
    g = std::make_shared<const GroupPresentation>(
        io::presentation_from_json(io::detail::require(doc, "group", "oracle")));
    phi = io::endomorphism_from_json(doc["endomorphism"], g);
  } else {
    AffineNValuedMap m = io::map_from_json(doc);
    if (m.size() != 1) throw io::InputError("oracle: expected a single endomorphism or a 1-valued map");
    g = m.group_ptr();
    phi = m.lift(0).linear;
  }
  const int first = std::max(2, req.box_bound - 2);
  auto census = oracle_nilpotent_census(*g, *phi, first, req.box_bound);
  ExtendedCount formula = to_count(abs_inf(det_i_minus_differential(*phi)));
  bool stable = is_stable(census);
  bool agree = !stable || (formula.is_finite() &&
                           formula.value() == static_cast<unsigned long>(census.back().classes));
  json bounds = json::array();
  std::string text;
  for (const auto& c : census) {
    bounds.push_back({{"box", c.box_bound}, {"classes", c.classes}});
    text += "box " + std::to_string(c.box_bound) + ": " + std::to_string(c.classes) + " classes\n";
  }
  text += "formula |det(I - phi_*)| = " + formula.to_string() + (stable ? ", census stable" : ", census not yet stable") + "\n";
  json report = {{"census", bounds}, {"formula", formula.to_string()}, {"stable", stable}, {"agree", agree}};
  emit(out, req.format, report, text);
  return agree ? exit_ok : exit_invalid;
}

}  // namespace detail

inline int run(const AnalysisRequest& req, std::ostream& out, std::ostream& err) {
  try {
    io::json doc = io::read_file(req.input);
    switch (req.command) {
      case Command::validate: return detail::run_validate(req, doc, out);
      case Command::analyze: return detail::run_analyze(req, doc, out);
      case Command::fixed_points: return detail::run_fixed_points(req, doc, out);
      case Command::oracle: return detail::run_oracle(req, doc, out);
    }
  } catch (const io::InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_malformed;
  } catch (const io::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return exit_malformed;
  } catch (const SigmaError& e) {
    if (req.format == Format::json)
      out << io::json{{"error", "sigma"}, {"kind", to_string(e.kind)}, {"element", e.element},
                      {"lift", e.lift + 1}, {"failure", e.what()}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return exit_malformed;
}

}  // namespace nilfix::cli
