#pragma once

// Command-line front end. `run` parses arguments, dispatches to the library and writes one report to
// `out`; diagnostics go to `err`. Exit codes: 0 success, 1 invalid parameters, 2 internal
// inconsistency (including golden-value mismatches under --check).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polygon_gpt.hpp"

#ifndef POLYGON_GPT_DEFAULT_GOLDEN
#define POLYGON_GPT_DEFAULT_GOLDEN "data/golden.json"
#endif

namespace polygon_gpt::cli {

using Json = nlohmann::ordered_json;

enum class Command { model, orbits, enumerate, classify, hardy, chsh, werner, hardy_mixed, fig5 };
enum class Format { json, csv };

struct RunConfig {
  Command command = Command::model;
  int n = 4;
  unsigned workers = 1;
  Format format = Format::json;
  bool check = false;
  std::string golden_path;
  std::optional<double> tolerance; ///< overrides the golden table's comparison tolerance
  std::string state = "J";
  std::string tuple;
  double epsilon = 1.0;
  std::string product;
  std::string representative = "min";
  int min_n = 4;
  int max_n = 20;
};

/// Rounds to 15 significant digits so reports are stable across platforms.
inline double sig15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline Json to_json(const Vec3 &v) { return Json::array({sig15(v.x), sig15(v.y), sig15(v.z)}); }

inline Json to_json(const BipartiteState &phi) {
  Json a = Json::array();
  for (double v : row_major(phi)) a.push_back(sig15(v));
  return a;
}

inline Json to_json(const Behaviour &b) {
  Json rows = Json::array();
  for (const auto &row : b.p) {
    Json r = Json::array();
    for (double v : row) r.push_back(sig15(v));
    rows.push_back(r);
  }
  return rows;
}

inline Json labels_json(const std::array<MeasurementLabel, 4> &labels, int n) {
  return {{"M1", to_string(labels[0], n)},
          {"M2", to_string(labels[1], n)},
          {"N1", to_string(labels[2], n)},
          {"N2", to_string(labels[3], n)}};
}

inline Json to_json(const HardyWitness &w, int n) {
  return {{"measurements", labels_json(w.labels, n)},
          {"success", sig15(w.success)},
          {"residuals", Json::array({sig15(w.residuals[0]), sig15(w.residuals[1]), sig15(w.residuals[2])})}};
}

/// Golden-table comparisons collected during one run.
class GoldenCheck {
public:
  GoldenCheck() = default;
  GoldenCheck(Json data, std::optional<double> tolerance) : data_(std::move(data)), enabled_(true) {
    tol_ = tolerance.value_or(data_.value("tolerance", kTolerance));
  }

  bool enabled() const { return enabled_; }
  double tolerance() const { return tol_; }

  /// Golden entry at a JSON pointer, if present.
  const Json *find(const std::string &pointer) const {
    if (!enabled_) return nullptr;
    const Json::json_pointer ptr(pointer);
    return data_.contains(ptr) ? &data_.at(ptr) : nullptr;
  }

  void near(const std::string &what, double actual, double expected) {
    ++count_;
    if (!(std::abs(actual - expected) <= tol_))
      failures_.push_back(what + ": got " + fmt(actual) + ", expected " + fmt(expected));
  }
  void equal(const std::string &what, const Json &actual, const Json &expected) {
    ++count_;
    if (actual != expected) failures_.push_back(what + ": got " + actual.dump() + ", expected " + expected.dump());
  }
  void require(const std::string &what, bool ok) {
    ++count_;
    if (!ok) failures_.push_back(what);
  }

  Json report() const {
    return {{"passed", failures_.empty()}, {"comparisons", count_}, {"failures", failures_}};
  }
  bool passed() const { return failures_.empty(); }
  const std::vector<std::string> &failures() const { return failures_; }

private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
  }

  Json data_;
  bool enabled_ = false;
  double tol_ = kTolerance;
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
};

inline std::string resolve_golden_path(const std::string &flag) {
  if (!flag.empty()) return flag;
  if (const char *env = std::getenv("POLYGON_GPT_GOLDEN")) return env;
  return POLYGON_GPT_DEFAULT_GOLDEN;
}

inline GoldenCheck load_golden(const RunConfig &cfg) {
  if (!cfg.check) return {};
  const std::string path = resolve_golden_path(cfg.golden_path);
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open golden table " + path);
  Json data;
  try {
    data = Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw InvalidParameter("malformed golden table " + path + ": " + e.what());
  }
  return {std::move(data), cfg.tolerance};
}

/// Named library state ("J", "H", "III", "Phi_II", ...) or a JSON matrix (9 numbers or 3x3 rows).
struct ResolvedState {
  BipartiteState state;
  std::optional<std::string> name;
};

inline ResolvedState resolve_state(const std::string &spec, const PolygonModel &model) {
  const auto first = spec.find_first_not_of(" \t");
  if (first != std::string::npos && spec[first] == '[') {
    Json j;
    try {
      j = Json::parse(spec);
    } catch (const Json::parse_error &e) {
      throw InvalidParameter(std::string("malformed state JSON: ") + e.what());
    }
    std::vector<double> v;
    try {
      for (const auto &x : j) {
        if (x.is_array())
          for (const auto &y : x) v.push_back(y.get<double>());
        else
          v.push_back(x.get<double>());
      }
    } catch (const Json::exception &e) {
      throw InvalidParameter(std::string("malformed state JSON: ") + e.what());
    }
    BipartiteState phi = state_from_row_major(v);
    if (!is_valid_state(phi, model)) throw InvalidParameter("state is not normalized or violates positivity");
    return {phi, std::nullopt};
  }
  const auto named = find_named_state(model.n, spec);
  if (!named) throw InvalidParameter("unknown state '" + spec + "' for n = " + std::to_string(model.n));
  const std::string bare = spec.rfind("Phi_", 0) == 0 ? spec.substr(4) : spec;
  return {*named, "Phi_" + bare};
}

/// Parses "M1,M2,N1,N2" where each entry is `i` ({e_i, ē_i}), `ib` ({ē_i, e_i}) or, for even n, `i-j`
/// ({e_i, e_j}).
inline std::array<DichotomicMeasurement, 4> parse_tuple(const std::string &text, const PolygonModel &model) {
  std::array<DichotomicMeasurement, 4> out;
  std::stringstream ss(text);
  std::string tok;
  std::size_t k = 0;
  while (std::getline(ss, tok, ',')) {
    if (k == 4) throw InvalidParameter("--tuple takes exactly four measurements");
    try {
      std::size_t pos = 0;
      const int a = std::stoi(tok, &pos);
      const std::string rest = tok.substr(pos);
      if (a < 1 || a > model.n) throw InvalidParameter("measurement index out of range in '" + tok + "'");
      if (rest.empty())
        out[k] = measurement(model, a, false);
      else if (rest == "b")
        out[k] = measurement(model, a, true);
      else if (rest[0] == '-')
        out[k] = measurement_from_pair(model, a, std::stoi(rest.substr(1)));
      else
        throw InvalidParameter("bad measurement token '" + tok + "'");
    } catch (const std::logic_error &e) {
      if (dynamic_cast<const InvalidParameter *>(&e)) throw;
      throw InvalidParameter("bad measurement token '" + tok + "'");
    }
    ++k;
  }
  if (k != 4) throw InvalidParameter("--tuple takes exactly four measurements");
  return out;
}

inline std::pair<int, int> parse_product(const std::string &text) {
  int i = 0, j = 0;
  char comma = 0;
  std::stringstream ss(text);
  if (!(ss >> i >> comma >> j) || comma != ',' || !ss.eof()) throw InvalidParameter("--product expects i,j");
  return {i, j};
}

inline std::string table_label(int a, int n) {
  const int k = a % n;
  std::string s = k == 0 ? "" : (k == 1 ? "r" : "r^" + std::to_string(k));
  if (a >= n) s += "f";
  return s.empty() ? "I" : s;
}

inline std::string key(int n) { return std::to_string(n); }

// ---- subcommands ---------------------------------------------------------------------------

inline Json cmd_model(const RunConfig &cfg, GoldenCheck &check) {
  const PolygonModel model = build_model(cfg.n);
  Json out{{"n", model.n},
           {"r_n", sig15(model.r_n)},
           {"parity", model.parity == Parity::odd ? "odd" : "even"},
           {"transformation_count", transformations(model).size()}};
  Json states = Json::array(), effects = Json::array(), complements = Json::array();
  for (const auto &w : model.states) states.push_back(to_json(w));
  for (const auto &e : model.ray_effects) effects.push_back(to_json(e));
  for (const auto &e : model.complement_effects) complements.push_back(to_json(e));
  out["states"] = states;
  out["ray_effects"] = effects;
  out["complement_effects"] = complements;
  if (model.parity == Parity::odd) {
    const OrthogonalityGraph g = orthogonality_graph(model);
    auto name = [&](int node) {
      return node < model.n ? "e" + std::to_string(node + 1) : "ebar" + std::to_string(node - model.n + 1);
    };
    Json adj = Json::object();
    for (std::size_t v = 0; v < g.adjacency.size(); ++v) {
      Json nb = Json::array();
      for (int u : g.adjacency[v]) nb.push_back(name(u));
      adj[name(static_cast<int>(v))] = nb;
    }
    out["orthogonality"] = adj;
    if (const Json *gold = check.find("/model/" + key(cfg.n) + "/orthogonal_to_e1")) {
      Json got = adj["e1"];
      std::vector<std::string> a = got.get<std::vector<std::string>>(), b = gold->get<std::vector<std::string>>();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      check.equal("neighbours of e1", Json(a), Json(b));
    }
  }
  return out;
}

inline Json cmd_orbits(const RunConfig &cfg, GoldenCheck &check, std::string &csv) {
  const SymmetryGroup group(cfg.n);
  const auto table = fixed_point_table(group);
  std::uint64_t sum = 0;
  for (const auto &row : table)
    for (auto v : row) sum += v;
  const std::uint64_t orbits = burnside_orbit_count(group);
  if (sum / group.order() != orbits)
    throw InternalInconsistency("fixed-point table disagrees with the Burnside total");
  Json out{{"n", cfg.n},
           {"group_order", group.order()},
           {"orbit_count", orbits},
           {"fixed_point_sum", sum},
           {"fixed_point_table", table}};
  const int size = 2 * cfg.n;
  std::ostringstream grid;
  grid << "g";
  for (int b = 0; b < size; ++b) grid << "," << table_label(b, cfg.n);
  grid << "\n";
  for (int a = 0; a < size; ++a) {
    grid << table_label(a, cfg.n);
    for (int b = 0; b < size; ++b) grid << "," << table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    grid << "\n";
  }
  csv = grid.str();
  const std::string base = "/orbits/" + key(cfg.n);
  if (const Json *g = check.find(base + "/orbit_count")) check.equal("orbit_count", orbits, *g);
  if (const Json *g = check.find(base + "/group_order")) check.equal("group_order", group.order(), *g);
  if (const Json *g = check.find(base + "/fixed_point_sum")) check.equal("fixed_point_sum", sum, *g);
  if (const Json *g = check.find(base + "/fixed_point_table")) check.equal("fixed_point_table", Json(table), *g);
  return out;
}

struct EnumerationReport {
  Enumeration enumeration;
  std::vector<EntanglementClass> classes;
};

inline EnumerationReport run_enumeration(const RunConfig &cfg) {
  if (cfg.representative != "min" && cfg.representative != "max")
    throw InvalidParameter("--representative must be min or max");
  const SymmetryGroup group(cfg.n);
  EnumerationOptions opts{cfg.representative == "min" ? RepresentativeChoice::minimal : RepresentativeChoice::maximal,
                          cfg.workers};
  EnumerationReport rep{enumerate_extreme_states(group, opts), {}};
  rep.classes = classify_entangled(rep.enumeration.vertices, group, canonical_entangled_states(cfg.n));
  return rep;
}

inline Json class_json(const EntanglementClass &c) {
  Json j{{"id", c.id},
         {"size", c.size},
         {"representative", to_json(c.representative)},
         {"matched_name", c.matched_name ? Json(*c.matched_name) : Json(nullptr)},
         {"symmetric", c.symmetric},
         {"representative_symmetric", c.representative_symmetric},
         {"swap_related_to", c.swap_related_to ? Json(*c.swap_related_to) : Json(nullptr)},
         {"swap_closed", c.swap_closed}};
  return j;
}

inline Json cmd_enumerate(const RunConfig &cfg, GoldenCheck &check, std::string &csv) {
  const EnumerationReport rep = run_enumeration(cfg);
  const Enumeration &e = rep.enumeration;
  const PolygonModel model = build_model(cfg.n);
  const std::size_t products = count_product_states(e.vertices, model);
  Json classes = Json::array();
  std::vector<std::size_t> sizes;
  for (const auto &c : rep.classes) {
    classes.push_back(class_json(c));
    sizes.push_back(c.size);
  }
  Json out{{"n", cfg.n},
           {"representatives", e.representatives},
           {"unique_solutions", e.unique_solutions},
           {"feasible_solutions", e.feasible_solutions},
           {"total_vertices", e.vertices.size()},
           {"product_count", products},
           {"entangled_count", e.vertices.size() - products},
           {"classes", classes}};

  std::ostringstream dump;
  dump << "index,kind,class,m11,m12,m13,m21,m22,m23,m31,m32,m33\n";
  std::map<StateKey, int> owner;
  for (const auto &c : rep.classes)
    for (const auto &m : c.members) owner[state_key(m)] = c.id;
  for (std::size_t i = 0; i < e.vertices.size(); ++i) {
    const auto &v = e.vertices[i];
    const auto it = owner.find(state_key(v));
    dump << i << "," << (it == owner.end() ? "product" : "entangled") << ","
         << (it == owner.end() ? std::string() : std::to_string(it->second));
    for (double x : row_major(v)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.15g", sig15(x));
      dump << "," << buf;
    }
    dump << "\n";
  }
  csv = dump.str();

  const std::string base = "/enumeration/" + key(cfg.n);
  if (const Json *g = check.find(base + "/total_vertices")) check.equal("total_vertices", e.vertices.size(), *g);
  if (const Json *g = check.find(base + "/product_count")) check.equal("product_count", products, *g);
  if (const Json *g = check.find(base + "/entangled_count"))
    check.equal("entangled_count", e.vertices.size() - products, *g);
  if (const Json *g = check.find(base + "/class_count")) check.equal("class_count", rep.classes.size(), *g);
  if (const Json *g = check.find(base + "/class_sizes")) {
    std::vector<std::size_t> sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    check.equal("class_sizes", sorted, *g);
  }
  if (const Json *g = check.find(base + "/class_names"))
    for (const auto &[name, size] : g->items()) {
      const auto it = std::find_if(rep.classes.begin(), rep.classes.end(),
                                   [&](const EntanglementClass &c) { return c.matched_name == name; });
      check.require("class containing " + name + " exists", it != rep.classes.end());
      if (it != rep.classes.end()) check.equal("size of class " + name, it->size, size);
    }
  return out;
}

inline Json cmd_classify(const RunConfig &cfg, GoldenCheck &check) {
  const EnumerationReport rep = run_enumeration(cfg);
  const PolygonModel model = build_model(cfg.n);
  Json library = Json::array();
  std::set<int> distinct;
  const auto named_states = canonical_entangled_states(cfg.n);
  for (const auto &ns : named_states) {
    const auto it = std::find_if(rep.classes.begin(), rep.classes.end(), [&](const EntanglementClass &c) {
      return c.matched_name && ("," + *c.matched_name + ",").find("," + ns.name + ",") != std::string::npos;
    });
    const FacetCertificate cert = facet_certificate(ns.state, model);
    Json entry{{"name", ns.name},
               {"matrix", to_json(ns.state)},
               {"valid", is_valid_state(ns.state, model)},
               {"facet_rank", cert.rank},
               {"tight_facets", cert.tight},
               {"symmetric", is_symmetric(ns.state)},
               {"inner_product_state", is_inner_product_state(ns.state)},
               {"class_id", it == rep.classes.end() ? Json(nullptr) : Json(it->id)},
               {"class_size", it == rep.classes.end() ? Json(nullptr) : Json(it->size)}};
    if (it != rep.classes.end()) distinct.insert(it->id);
    library.push_back(entry);
    if (const Json *g = check.find("/library_symmetry/" + key(cfg.n) + "/" + ns.name))
      check.equal(ns.name + " symmetric", is_symmetric(ns.state), *g);
  }
  Json classes = Json::array();
  for (const auto &c : rep.classes) classes.push_back(class_json(c));
  Json out{{"n", cfg.n},
           {"class_count", rep.classes.size()},
           {"library", library},
           {"library_classes_distinct", distinct.size() == named_states.size()},
           {"classes", classes}};
  if (cfg.n == 6) {
    Json variants = Json::array();
    for (const auto &v : phi_iii_sign_resolution())
      variants.push_back({{"signs", v.signs},
                          {"valid", v.valid},
                          {"extreme", v.extreme},
                          {"symmetric", v.symmetric},
                          {"printed", v.printed}});
    out["phi_iii_sign_variants"] = variants;
  }
  if (check.enabled()) {
    check.require("library states fall in distinct classes", distinct.size() == named_states.size());
    if (const Json *g = check.find("/enumeration/" + key(cfg.n) + "/class_count"))
      check.equal("class_count", rep.classes.size(), *g);
  }
  return out;
}

inline Json cmd_hardy(const RunConfig &cfg, GoldenCheck &check) {
  const PolygonModel model = build_model(cfg.n);
  const ResolvedState rs = resolve_state(cfg.state, model);
  const HardyScan scan = hardy_scan(rs.state, model, cfg.workers);
  const QuantumReference q = quantum_reference_constants();
  Json ties = Json::array();
  for (const auto &w : scan.ties) ties.push_back(to_json(w, cfg.n));
  Json out{{"n", cfg.n},
           {"state", rs.name ? Json(*rs.name) : Json(nullptr)},
           {"matrix", to_json(rs.state)},
           {"best", scan.best ? to_json(*scan.best, cfg.n) : Json(nullptr)},
           {"tie_count", scan.ties.size()},
           {"ties", ties},
           {"max_constrained_success", sig15(scan.max_constrained_success)},
           {"hardy_quantum_max", sig15(q.hardy_quantum_max)},
           {"post_quantum", scan.best && is_post_quantum(scan.best->success)}};

  if (!cfg.tuple.empty()) {
    const auto m = parse_tuple(cfg.tuple, model);
    const Behaviour b = behaviour(rs.state, m[0], m[1], m[2], m[3]);
    const auto success = hardy_check(b);
    const auto res = hardy_residuals(b);
    out["tuple"] = {{"measurements", labels_json(b.labels, cfg.n)},
                    {"behaviour", to_json(b)},
                    {"success", success ? Json(sig15(*success)) : Json(nullptr)},
                    {"success_cell", sig15(b(1, 1, 1, 1))},
                    {"residuals", Json::array({sig15(res[0]), sig15(res[1]), sig15(res[2])})},
                    {"no_signaling_violation", sig15(no_signaling_violation(b))}};
    if (const Json *rows = check.find("/hardy/hexagon_table"); rows && cfg.n == 6 && rs.name)
      for (const auto &row : *rows) {
        if (row["state"] != *rs.name) continue;
        bool same = true;
        for (std::size_t k = 0; k < 4; ++k) {
          const DichotomicMeasurement g = measurement_from_pair(model, row["tuple"][k][0], row["tuple"][k][1]);
          same = same && g.label == m[k].label;
        }
        if (!same) continue;
        check.require("table tuple satisfies the Hardy conditions", success.has_value());
        if (success) check.near(*rs.name + " table success", *success, row["success"].get<double>());
      }
  }

  if (rs.name == "Phi_J") {
    if (const Json *g = check.find("/hardy/phi_j_success/" + key(cfg.n))) {
      check.require("Phi_J has a Hardy witness", scan.best.has_value());
      if (scan.best) check.near("Phi_J Hardy success", scan.best->success, g->get<double>());
    }
    if (const Json *g = check.find("/hardy/phi_j_none"))
      for (const auto &v : *g)
        if (v.get<int>() == cfg.n) check.require("Phi_J has no Hardy witness", !scan.best.has_value());
  }
  if (rs.name == "Phi_H" && cfg.n == 5)
    if (const Json *g = check.find("/hardy/pentagon_phi_h")) {
      check.require("Phi_H has a Hardy witness", scan.best.has_value());
      if (scan.best) {
        check.near("Phi_H Hardy success", scan.best->success, g->get<double>());
        check.require("Phi_H success exceeds the quantum maximum", is_post_quantum(scan.best->success));
      }
    }
  if (const Json *g = check.find("/hardy/quantum_max")) check.near("hardy_quantum_max", q.hardy_quantum_max, g->get<double>());
  return out;
}

inline Json cmd_chsh(const RunConfig &cfg, GoldenCheck &check) {
  const PolygonModel model = build_model(cfg.n);
  const ResolvedState rs = resolve_state(cfg.state, model);
  const ChshResult r = chsh_max(rs.state, model, cfg.workers);
  const QuantumReference q = quantum_reference_constants();
  Json out{{"n", cfg.n},
           {"state", rs.name ? Json(*rs.name) : Json(nullptr)},
           {"matrix", to_json(rs.state)},
           {"chsh_max", sig15(r.value)},
           {"signed_value", sig15(r.signed_value)},
           {"measurements", labels_json(r.labels, cfg.n)},
           {"local_bound", 2},
           {"tsirelson", sig15(q.tsirelson)},
           {"exceeds_local_bound", r.value > 2.0 + kTolerance},
           {"exceeds_tsirelson", r.value > q.tsirelson + kTolerance}};
  if (rs.name == "Phi_J") {
    if (const Json *g = check.find("/chsh/phi_j_max/" + key(cfg.n))) check.near("Phi_J CHSH max", r.value, g->get<double>());
    if (cfg.n % 2 == 1 && check.enabled())
      check.require("odd-gon Phi_J respects the Tsirelson bound", r.value <= q.tsirelson + check.tolerance());
  }
  if (const Json *g = check.find("/hardy/tsirelson")) check.near("tsirelson", q.tsirelson, g->get<double>());
  return out;
}

inline Json cmd_werner(const RunConfig &cfg, GoldenCheck &check) {
  const ThresholdReport t = noise_thresholds(cfg.n, cfg.workers);
  Json out{{"n", t.n},
           {"b_max", sig15(t.b_max)},
           {"p_e", sig15(t.p_e)},
           {"p_nl", sig15(t.p_nl)},
           {"p_nl_formula", sig15(t.p_nl_formula)},
           {"gap_exists", t.gap_exists}};
  if (const Json *g = check.find("/werner/p_e/" + key(cfg.n))) check.near("p_e", t.p_e, g->get<double>());
  if (const Json *g = check.find("/werner/gap_exists/" + key(cfg.n))) check.equal("gap_exists", t.gap_exists, *g);
  return out;
}

inline Json cmd_hardy_mixed(const RunConfig &cfg, GoldenCheck &check) {
  MixedHardy h;
  std::optional<double> expected;
  if (cfg.n % 2 == 0) {
    if (!cfg.product.empty()) throw InvalidParameter("--product applies to the pentagon only");
    h = hardy_mixed_even(cfg.n, cfg.epsilon);
    if (const Json *g = check.find("/hardy/phi_j_success/" + key(cfg.n))) expected = cfg.epsilon * g->get<double>();
  } else if (cfg.n == 5) {
    if (cfg.product.empty()) throw InvalidParameter("the pentagon needs --product i,j");
    h = hardy_mixed_pentagon(cfg.epsilon, parse_product(cfg.product));
    if (const Json *g = check.find("/hardy_mixed/pentagon_unit_success")) expected = cfg.epsilon * g->get<double>();
  } else {
    throw Unsupported("mixed Hardy constructions exist for even n and n = 5 only");
  }
  Json out{{"n", cfg.n},
           {"epsilon", sig15(cfg.epsilon)},
           {"product", Json::array({h.product.first, h.product.second})},
           {"witness", to_json(h.witness, cfg.n)},
           {"behaviour", to_json(h.behaviour)},
           {"no_signaling_violation", sig15(no_signaling_violation(h.behaviour))},
           {"state_valid", is_valid_state(h.state.mixed(), build_model(cfg.n))}};
  if (expected) check.near("mixed Hardy success", h.witness.success, *expected);
  return out;
}

inline Json cmd_fig5(const RunConfig &cfg, GoldenCheck &check, std::string &csv) {
  if (cfg.min_n < 4 || cfg.max_n < cfg.min_n) throw InvalidParameter("need 4 <= --min-n <= --max-n");
  const double qmax = quantum_reference_constants().hardy_quantum_max;
  Json rows = Json::array();
  std::ostringstream table;
  table << "n,hardy_success,hardy_quantum_max\n";
  for (int n = cfg.min_n + cfg.min_n % 2; n <= cfg.max_n; n += 2) {
    const PolygonModel model = build_model(n);
    const HardyScan scan = hardy_scan(phi_j(n), model, cfg.workers);
    if (!scan.best) throw InternalInconsistency("Phi_J shows no Hardy witness for n = " + std::to_string(n));
    const double s = scan.best->success;
    rows.push_back({{"n", n}, {"hardy_success", sig15(s)}, {"hardy_quantum_max", sig15(qmax)}});
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%.15g,%.15g\n", n, sig15(s), sig15(qmax));
    table << buf;
    if (const Json *g = check.find("/hardy/phi_j_success/" + key(n)))
      check.near("Phi_J Hardy success n=" + key(n), s, g->get<double>());
  }
  csv = table.str();
  return {{"rows", rows}};
}

// ---- entry point -------------------------------------------------------------------------

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  cfg.workers = default_workers();
  std::string format = "json";

  CLI::App app{"Polygon-model composite systems: orbits, extreme states, Hardy and CHSH nonlocality"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App *sub, bool with_n = true) {
    if (with_n) sub->add_option("--n", cfg.n, "number of polygon vertices (>= 4)")->required();
    sub->add_option("--workers", cfg.workers, "worker threads (default: $POLYGON_GPT_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--check", cfg.check, "compare results against the golden table");
    sub->add_option("--golden", cfg.golden_path, "golden table path (default: $POLYGON_GPT_GOLDEN or built-in path)");
    sub->add_option("--tolerance", cfg.tolerance, "override the golden comparison tolerance")
        ->check(CLI::PositiveNumber);
    return sub;
  };

  auto *model = common(app.add_subcommand("model", "states, effects and orthogonality of the n-gon"));
  auto *orbits = common(app.add_subcommand("orbits", "Burnside orbit count of 8-subsets of product effects"));
  orbits->add_option("--format", format, "json, csv (the fixed-point grid) or grid")
      ->check(CLI::IsMember({"json", "csv", "grid"}));
  auto *enumerate = common(app.add_subcommand("enumerate", "extreme states of the bipartite maximal composition"));
  enumerate->add_option("--format", format, "json or csv (vertex dump)")->check(CLI::IsMember({"json", "csv"}));
  enumerate->add_option("--representative", cfg.representative, "orbit representative: min or max");
  auto *classify = common(app.add_subcommand("classify", "match library states to entangled classes"));
  auto *hardy = common(app.add_subcommand("hardy", "exhaustive Hardy scan of a state"));
  hardy->add_option("--state", cfg.state, "library name (J, H, I..VI) or JSON matrix");
  hardy->add_option("--tuple", cfg.tuple, "evaluate one tuple M1,M2,N1,N2 (tokens i, ib, or i-j for even n)");
  auto *chsh = common(app.add_subcommand("chsh", "maximal CHSH value of a state"));
  chsh->add_option("--state", cfg.state, "library name (J, H, I..VI) or JSON matrix");
  auto *werner = common(app.add_subcommand("werner", "entanglement and CHSH thresholds of p Phi_J + (1-p) u(x)u"));
  auto *mixed = common(app.add_subcommand("hardy-mixed", "Hardy witness of an entangled state mixed with a product state"));
  mixed->add_option("--epsilon", cfg.epsilon, "weight of the entangled state, in (0, 1]");
  mixed->add_option("--product", cfg.product, "pentagon product state i,j");
  auto *fig5 = common(app.add_subcommand("fig5", "maximal Hardy success of Phi_J for even n"), false);
  fig5->add_option("--min-n", cfg.min_n, "smallest n");
  fig5->add_option("--max-n", cfg.max_n, "largest n");
  fig5->add_option("--format", format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  if (fig5->parsed() && format == "json" && !fig5->count("--format")) format = "csv";
  cfg.format = (format == "csv" || format == "grid") ? Format::csv : Format::json;
  if (model->parsed()) cfg.command = Command::model;
  if (orbits->parsed()) cfg.command = Command::orbits;
  if (enumerate->parsed()) cfg.command = Command::enumerate;
  if (classify->parsed()) cfg.command = Command::classify;
  if (hardy->parsed()) cfg.command = Command::hardy;
  if (chsh->parsed()) cfg.command = Command::chsh;
  if (werner->parsed()) cfg.command = Command::werner;
  if (mixed->parsed()) cfg.command = Command::hardy_mixed;
  if (fig5->parsed()) cfg.command = Command::fig5;

  try {
    if (cfg.command != Command::fig5 && cfg.n < 4) throw InvalidParameter("--n must be at least 4");
    GoldenCheck check = load_golden(cfg);
    std::string csv;
    Json report;
    switch (cfg.command) {
    case Command::model: report = cmd_model(cfg, check); break;
    case Command::orbits: report = cmd_orbits(cfg, check, csv); break;
    case Command::enumerate: report = cmd_enumerate(cfg, check, csv); break;
    case Command::classify: report = cmd_classify(cfg, check); break;
    case Command::hardy: report = cmd_hardy(cfg, check); break;
    case Command::chsh: report = cmd_chsh(cfg, check); break;
    case Command::werner: report = cmd_werner(cfg, check); break;
    case Command::hardy_mixed: report = cmd_hardy_mixed(cfg, check); break;
    case Command::fig5: report = cmd_fig5(cfg, check, csv); break;
    }
    if (cfg.format == Format::csv && !csv.empty())
      out << csv;
    else {
      if (check.enabled()) report["check"] = check.report();
      out << report.dump(2) << "\n";
    }
    if (!check.passed()) {
      for (const auto &f : check.failures()) err << "golden mismatch: " << f << "\n";
      return 2;
    }
    return 0;
  } catch (const InternalInconsistency &e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    err << "invalid parameter: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error &e) {
    err << "unsupported: " << e.what() << "\n";
    return 1;
  }
}

} // namespace polygon_gpt::cli
