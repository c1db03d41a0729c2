#pragma once

// JSON and CSV forms of library objects. Object keys come out sorted, so a
// report serializes to the same bytes on every run.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/reducing.hpp"
#include "matbump/suites.hpp"
#include "matbump/verify.hpp"
#include "matbump/weights.hpp"
#include "matbump/young.hpp"

namespace matbump {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Young functions

inline json young_to_json(const YoungFn& f) {
  json j;
  j["label"] = f.label();
  switch (f.family()) {
    case YoungFamily::power:
      j["family"] = "power";
      j["r"] = f.r();
      j["coef"] = f.coef();
      break;
    case YoungFamily::power_log:
      j["family"] = "power_log";
      j["r"] = f.r();
      j["delta"] = f.delta();
      break;
    case YoungFamily::tabulated: {
      j["family"] = "tabulated";
      json pts = json::array();
      for (const auto& [t, v] : f.points()) pts.push_back({t, v});
      j["points"] = pts;
      break;
    }
  }
  return j;
}

namespace detail {

inline void reject_unknown(const json& j, const std::vector<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw std::invalid_argument(what + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw std::invalid_argument("unknown key '" + k + "' in " + what);
  }
}

}  // namespace detail

/// {"family": "power", "r": 2, "coef": 1} | {"family": "power_log", "r": 2, "delta": 1}
/// | {"family": "tabulated", "points": [[t, v], ...]}. A bare string such as
/// "power(2)", "power_log(2,1)" or a label such as "power_log(2;1)" is accepted as shorthand.
inline YoungFn young_from_json(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    for (const char* from : {";c=", ";"}) {
      for (std::size_t pos; (pos = s.find(from)) != std::string::npos;) s.replace(pos, std::strlen(from), ",");
    }
    double a = 0.0, b = 0.0;
    if (std::sscanf(s.c_str(), "power_log(%lf,%lf)", &a, &b) == 2) return YoungFn::power_log(a, b);
    if (std::sscanf(s.c_str(), "power(%lf,%lf)", &a, &b) == 2) return YoungFn::power(a, b);
    if (std::sscanf(s.c_str(), "power(%lf)", &a) == 1) return YoungFn::power(a);
    throw std::invalid_argument("cannot parse Young function '" + s + "'");
  }
  detail::reject_unknown(j, {"family", "r", "coef", "delta", "points", "label"}, "Young function");
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "power") return YoungFn::power(j.at("r").get<double>(), j.value("coef", 1.0));
  if (fam == "power_log") return YoungFn::power_log(j.at("r").get<double>(), j.at("delta").get<double>());
  if (fam == "tabulated") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return YoungFn::tabulated(std::move(pts));
  }
  throw std::invalid_argument("unknown Young family '" + fam + "'");
}

// ---------------------------------------------------------------------------
// Geometry

inline json grid_to_json(const Grid& g) { return {{"d", g.d}, {"L", g.L}, {"side", g.side}}; }

inline json cube_to_json(const Cube& q) {
  json shift = json::array(), m = json::array();
  for (int i = 0; i < q.d; ++i) {
    shift.push_back(q.shift[i]);
    m.push_back(q.m[i]);
  }
  return {{"id", q.to_string()}, {"k", q.k}, {"m", m}, {"shift_thirds", shift}};
}

/// {"k": 1, "m": [0], "shift_thirds": [0]}; the shift defaults to the base grid.
inline Cube cube_from_json(const json& j, int d) {
  detail::reject_unknown(j, {"k", "m", "shift_thirds", "id"}, "cube");
  Cube q;
  q.d = d;
  q.k = j.at("k").get<int>();
  const auto& m = j.at("m");
  if (!m.is_array() || static_cast<int>(m.size()) != d) throw std::invalid_argument("cube index must have d entries");
  for (int i = 0; i < d; ++i) q.m[i] = m[i].get<long long>();
  if (j.contains("shift_thirds")) {
    const auto& t = j.at("shift_thirds");
    if (!t.is_array() || static_cast<int>(t.size()) != d) throw std::invalid_argument("cube shift must have d entries");
    for (int i = 0; i < d; ++i) {
      q.shift[i] = t[i].get<int>();
      if (q.shift[i] < -1 || q.shift[i] > 1) throw std::invalid_argument("cube shift must be in {-1, 0, 1}");
    }
  }
  return q;
}

inline json sparse_to_json(const SparseFamily& s) {
  json cubes = json::array();
  for (std::size_t i = 0; i < s.cubes.size(); ++i) {
    json c = cube_to_json(s.cubes[i]);
    if (i < s.ratios.size()) c["major_ratio"] = s.ratios[i];
    if (i < s.sets.size()) c["major_cells"] = s.sets[i];
    cubes.push_back(c);
  }
  return {{"grid", grid_to_json(s.grid)}, {"cubes", cubes}};
}

inline json weight_to_json(const WeightField& w) {
  json cells = json::array();
  for (const SmallMat& m : w.cells) {
    json row = json::array();
    for (int i = 0; i < w.n; ++i)
      for (int j = 0; j < w.n; ++j) row.push_back(m(i, j));
    cells.push_back(row);
  }
  return {{"grid", grid_to_json(w.grid)}, {"n", w.n}, {"cells", cells}};
}

inline WeightField weight_from_json(const json& j) {
  detail::reject_unknown(j, {"grid", "n", "cells"}, "weight field");
  const json& gj = j.at("grid");
  detail::reject_unknown(gj, {"d", "L", "side"}, "grid");
  const Grid g(gj.at("d").get<int>(), gj.at("L").get<int>(), gj.value("side", 1.0));
  WeightField w(g, j.at("n").get<int>());
  const json& cells = j.at("cells");
  if (!cells.is_array() || cells.size() != g.cells()) throw std::invalid_argument("weight field needs one entry per cell");
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const json& row = cells[c];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(w.n * w.n))
      throw std::invalid_argument("weight cell needs n*n entries");
    SmallMat m(w.n);
    for (int i = 0; i < w.n; ++i)
      for (int k = 0; k < w.n; ++k) m(i, k) = row[static_cast<std::size_t>(i * w.n + k)].get<double>();
    w.cells[c] = m;
  }
  w.validate();
  return w;
}

// ---------------------------------------------------------------------------
// Results

inline json reducing_to_json(const ReducingOp& r) {
  json m = json::array();
  for (int i = 0; i < r.n(); ++i) {
    json row = json::array();
    for (int j = 0; j < r.n(); ++j) row.push_back(r.matrix(i, j));
    m.push_back(row);
  }
  json prov = {{"method", to_string(r.provenance)}, {"psi", r.psi},       {"role", r.role},
               {"directions", r.directions},          {"epsilon", r.epsilon}, {"iterations", r.iterations},
               {"residual", r.residual},              {"scale", r.scale}};
  if (r.cube) prov["cube"] = r.cube->to_string();
  return {{"matrix", m}, {"provenance", prov}};
}

inline json report_to_json(const ConstantReport& r) {
  return {{"name", r.name},     {"value", r.value},       {"cube", r.cube},
          {"method", r.method}, {"p", r.p},               {"q", r.q},
          {"alpha", r.alpha},   {"phi", r.phi},           {"psi", r.psi},
          {"census", r.census}, {"cubes_scanned", r.cubes_scanned}, {"lower_bound", r.lower_bound},
          {"warnings", r.warnings}};
}

inline std::string csv_header() { return "name,p,q,alpha,phi,psi,value,cube,method"; }

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Shortest text that reads back to the same double.
inline std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string csv_row(const ConstantReport& r) {
  using detail::csv_field;
  using detail::num;
  return csv_field(r.name) + "," + num(r.p) + "," + num(r.q) + "," + num(r.alpha) + "," + csv_field(r.phi) + "," +
         csv_field(r.psi) + "," + num(r.value) + "," + csv_field(r.cube) + "," + csv_field(r.method);
}

inline json estimate_to_json(const NormEstimate& e) {
  json trace = json::array();
  for (const auto& t : e.trace) trace.push_back({{"step", t.step}, {"ratio", t.ratio}});
  return {{"operator", e.op},          {"p", e.p},          {"q", e.q},
          {"weak", e.weak},            {"value", e.value},  {"test_function_id", e.test_id},
          {"test_function", e.test_function.data}, {"trials", e.trials}, {"trace", trace},
          {"method", "estimated"}};
}

inline json suite_to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"anchor", c.anchor},
                      {"relation", c.relation},
                      {"measured", c.measured},
                      {"bound", c.bound},
                      {"pass", c.pass},
                      {"trials", c.trials},
                      {"detail", c.detail}});
  json series = json::object();
  for (const auto& [name, pts] : r.series) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    series[name] = a;
  }
  json j = {{"suite", r.suite},
            {"seed", r.config.seed},
            {"census", to_string(r.config.census)},
            {"config",
             {{"trials", r.config.trials}, {"budget", r.config.budget}, {"level", r.config.level},
              {"experimental", r.config.experimental}}},
            {"checks", checks},
            {"notes", r.notes},
            {"series", series},
            {"pass", r.passed()}};
  if (!r.passed()) j["reproducer"] = r.reproducer();
  return j;
}

/// Canonical text form: sorted keys, two-space indent, trailing newline.
inline std::string canonical(const json& j) { return j.dump(2) + "\n"; }

}  // namespace matbump
