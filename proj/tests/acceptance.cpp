// Acceptance run: one PASS/FAIL line per criterion, built from the
// verification suites at their default sizes. Exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "matbump/serialize.hpp"
#include "matbump/suites.hpp"

using namespace matbump;

namespace {

struct Timed {
  SuiteReport report;
  double seconds = 0.0;
};

std::map<std::string, Timed>& cache() {
  static std::map<std::string, Timed> c;
  return c;
}

SuiteConfig base_config() {
  SuiteConfig cfg;
  cfg.seed = 1;
  return cfg;
}

const Timed& suite(const std::string& name) {
  auto it = cache().find(name);
  if (it != cache().end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_suite(name, base_config()), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache().emplace(name, std::move(t)).first->second;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> parts;

  void add(bool ok, const std::string& text) {
    pass = pass && ok;
    parts.push_back(text);
  }

  // one named check of a suite; a missing check counts as a failure
  void check(const std::string& suite_name, const std::string& check_name) {
    const CheckResult* c = suite(suite_name).report.find(check_name);
    if (!c) {
      add(false, suite_name + "/" + check_name + " missing");
      return;
    }
    add(c->pass, check_name + " " + num(c->measured) + " " + c->relation + " " + num(c->bound) +
                     (c->trials > 1 ? " (" + std::to_string(c->trials) + " trials)" : ""));
  }

  // every check of a suite whose name starts with prefix
  void checks_with_prefix(const std::string& suite_name, const std::string& prefix) {
    int found = 0;
    for (const CheckResult& c : suite(suite_name).report.checks) {
      if (c.name.rfind(prefix, 0) != 0) continue;
      ++found;
      check(suite_name, c.name);
    }
    if (!found) add(false, suite_name + "/" + prefix + "* missing");
  }

  void all_checks(const std::string& suite_name) { checks_with_prefix(suite_name, ""); }

  void runtime(const std::vector<std::string>& suites, double limit) {
    double total = 0.0;
    for (const auto& s : suites) total += suite(s).seconds;
    add(total < limit, "runtime " + num(total) + " s < " + num(limit) + " s");
  }
};

struct Criterion {
  int id;
  std::string title;
  std::function<void(Verdict&)> body;
};

std::vector<Criterion> criteria() {
  return {
      {1, "generalized Hoelder",
       [](Verdict& v) {
         v.check("holder", "generalized_holder");
         const CheckResult* c = suite("holder").report.find("generalized_holder");
         v.add(c && c->trials == 200, "200 trials");
         v.runtime({"holder"}, 5.0);
       }},
      {2, "Luxemburg power consistency",
       [](Verdict& v) {
         v.check("holder", "luxemburg_power");
         const CheckResult* c = suite("holder").report.find("luxemburg_power");
         v.add(c && c->bound <= 1e-9 && c->trials == 100, "tolerance 1e-9 over 100 trials");
       }},
      {3, "reducing operator bands",
       [](Verdict& v) {
         for (const char* name : {"band_lower", "band_upper", "p2_vs_exact_lower", "p2_vs_exact_upper"})
           v.check("reducing", name);
         v.runtime({"reducing"}, 60.0);
       }},
      {4, "exact two-cell anchor",
       [](Verdict& v) {
         for (const char* name : {"anchor_ap", "anchor_exact_norm", "anchor_sharpness"}) v.check("avgop", name);
       }},
      {5, "averaging operators, sufficiency and necessity",
       [](Verdict& v) {
         for (const char* name : {"sufficiency", "necessity_p2", "necessity_estimated"}) v.check("avgop", name);
         v.runtime({"avgop"}, 300.0);
       }},
      {6, "weak type characterization", [](Verdict& v) { v.all_checks("weaktype"); }},
      {7, "maximal, fractional and sparse bump bounds",
       [](Verdict& v) {
         v.all_checks("maximal");
         v.all_checks("fracint");
         v.all_checks("sparse");
       }},
      {8, "sparse scaling with the A_p constant",
       [](Verdict& v) {
         v.checks_with_prefix("sharpconst", "slope");
         v.checks_with_prefix("sharpconst", "span");
         v.runtime({"sharpconst"}, 600.0);
       }},
      {9, "sharp reverse Hoelder",
       [](Verdict& v) {
         v.check("rh", "reverse_holder");
         v.check("rh", "exponents_above_one");
       }},
      {10, "pointwise, duality and degenerate regime",
       [](Verdict& v) {
         v.all_checks("pointwise");
         v.all_checks("duality");
         v.all_checks("degenerate");
       }},
      {11, "Poincare inequality", [](Verdict& v) { v.all_checks("poincare"); }},
      {12, "deterministic reports",
       [](Verdict& v) {
         int same = 0, total = 0;
         std::string differing;
         for (const std::string& name : suite_names()) {
           const std::string first = canonical(suite_to_json(suite(name).report));
           const std::string second = canonical(suite_to_json(run_suite(name, base_config())));
           ++total;
           if (first == second)
             ++same;
           else
             differing += " " + name;
         }
         v.add(same == total, std::to_string(same) + "/" + std::to_string(total) + " suites byte-identical" +
                                  (differing.empty() ? "" : ", differing:" + differing));
       }},
  };
}

}  // namespace

int main() {
  int failed = 0;
  for (const Criterion& c : criteria()) {
    Verdict v;
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.add(false, std::string("error: ") + e.what());
    }
    std::ostringstream line;
    line << (v.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << ":";
    for (std::size_t i = 0; i < v.parts.size(); ++i) line << (i ? "; " : " ") << v.parts[i];
    std::cout << line.str() << std::endl;
    failed += v.pass ? 0 : 1;
  }
  std::cout << (failed ? "FAIL" : "PASS") << " acceptance: " << 12 - failed << "/12 criteria" << std::endl;
  return failed ? 1 : 0;
}
