#include "varcalc/report.hpp"

#include <cmath>
#include <sstream>

namespace varcalc::report {

namespace {
// no "-0.0" in reports
double unsigned_zero(double v) { return v == 0 ? 0.0 : v; }
}  // namespace

json value(const ExtReal& v) {
  if (v.is_infinite()) return "+inf";
  return unsigned_zero(v.value());
}

json value(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(unsigned_zero(v(i)));
  return a;
}

json value(const Generators& g) {
  json j;
  j["points"] = json::array();
  for (const Vec& p : g.points) j["points"].push_back(value(p));
  j["rays"] = json::array();
  for (const Vec& r : g.rays) j["rays"].push_back(value(r));
  j["lines"] = json::array();
  for (const Vec& l : g.lines) j["lines"].push_back(value(l));
  return j;
}

json value(const Polyhedron& p) {
  json j;
  j["A"] = json::array();
  for (int i = 0; i < p.rows(); ++i) j["A"].push_back(value(Vec(p.A().row(i).transpose())));
  j["b"] = value(p.b());
  json eq = json::array();
  for (int i = 0; i < p.rows(); ++i) eq.push_back(p.is_equality(i));
  j["eq"] = eq;
  return j;
}

json header(const std::string& command, std::uint64_t seed) {
  json j;
  j["tool"] = "varcalc";
  j["version"] = VARCALC_VERSION;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

namespace {

double finite_or_nan(double v) { return std::isfinite(v) ? v : std::nan(""); }

json number(double v) {
  if (std::isinf(v)) return v > 0 ? json("+inf") : json("-inf");
  return unsigned_zero(finite_or_nan(v));
}

}  // namespace

json growth(const GrowthReport& r) {
  static const char* labels[6] = {"(i) quadratic growth", "(ii) SMS and nonnegative second-order form",
                                  "(iii) SMS and local minimizer", "(iv) positive graphical-derivative pairing",
                                  "(v) uniform second-order bound", "(vi) positive second subderivative"};
  json j;
  json conds = json::object();
  for (int i = 0; i < 6; ++i) {
    const Condition& c = r.cond[i];
    json cj;
    cj["verdict"] = to_string(c.verdict);
    cj["provenance"] = c.provenance;
    cj["evidence"] = c.evidence;
    if (c.witness) cj["witness"] = value(*c.witness);
    conds[labels[i]] = cj;
  }
  j["conditions"] = conds;
  json m;
  m["lower"] = value(r.modulus.lower);
  m["upper"] = value(r.modulus.upper);
  m["meaningful"] = r.modulus.meaningful;
  j["qg_modulus"] = m;
  json a;
  a["critical_cone_zero"] = r.analysis.vacuous;
  a["exact_face_analysis"] = r.analysis.exact;
  a["faces"] = r.analysis.faces;
  a["multiplier_vertices"] = r.analysis.multiplier_vertices;
  a["lower"] = number(r.analysis.lower);
  a["upper"] = number(r.analysis.upper);
  if (r.analysis.witness.size()) a["witness"] = value(r.analysis.witness);
  j["critical_quadratic"] = a;
  j["lagrangian_form_used"] = r.lagrangian_form_used;
  j["consistency"] = r.consistency;
  j["caveats"] = r.caveats;
  return j;
}

json estimate(const LiminfEstimate& e, bool with_witnesses) {
  json j;
  j["value"] = value(e.value);
  j["diverging"] = e.diverging;
  j["threshold"] = e.threshold;
  j["evaluation_errors"] = e.evaluation_errors;
  json lm = json::array();
  for (double v : e.level_minima) lm.push_back(number(v));
  j["level_minima"] = lm;
  if (with_witnesses) {
    json w = json::array();
    for (const Witness& x : e.witnesses) {
      json wj;
      wj["level"] = x.level;
      wj["t"] = x.t;
      wj["direction"] = value(x.direction);
      wj["quotient"] = number(x.quotient);
      w.push_back(wj);
    }
    j["witnesses"] = w;
  }
  return j;
}

json falsify(const FalsifyResult& r, bool verified) {
  json j;
  j["eps"] = r.eps;
  j["probes"] = r.probes;
  j["rejected"] = r.rejected;
  if (r.counterexample) {
    const Counterexample& c = *r.counterexample;
    json cj;
    cj["x1"] = value(c.x1);
    cj["x2"] = value(c.x2);
    cj["v1"] = value(c.v1);
    cj["v2"] = value(c.v2);
    cj["r"] = c.r;
    cj["lhs"] = c.lhs;
    cj["rhs"] = c.rhs;
    cj["source"] = c.source;
    cj["verified"] = verified;
    j["counterexample"] = cj;
    j["verdict"] = verified ? "not prox-regular (verified counterexample)" : "counterexample failed re-verification";
  } else {
    j["counterexample"] = nullptr;
    j["verdict"] = "not falsified at this scale";
  }
  return j;
}

json max_formula(const MaxFormula& m) {
  json j;
  j["value"] = value(m.value);
  if (m.argmax_point) j["argmax_multiplier"] = value(*m.argmax_point);
  j["unrestricted_unbounded"] = m.unrestricted_unbounded;
  if (m.unrestricted_unbounded) j["tau_used"] = m.tau_used;
  return j;
}

json catalog_run(const CatalogEntry& e, bool& all_ok) {
  json j;
  j["id"] = e.id;
  j["description"] = e.description;
  json facts = json::array();
  all_ok = true;
  for (const Fact& f : e.facts) {
    json fj;
    fj["name"] = f.name;
    fj["expected"] = f.expected;
    fj["evidence"] = to_string(f.evidence);
    try {
      const FactOutcome o = f.check();
      fj["observed"] = o.observed;
      fj["ok"] = o.ok;
      all_ok = all_ok && o.ok;
    } catch (const std::exception& ex) {
      fj["observed"] = std::string("error: ") + ex.what();
      fj["ok"] = false;
      all_ok = false;
    }
    facts.push_back(fj);
  }
  j["facts"] = facts;
  return j;
}

namespace {

void render(const json& j, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string lead = pad + (j.is_object() ? it.key() + ":" : std::string("-"));
    const json& v = it.value();
    if (v.is_object() || (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array()))) {
      os << lead << "\n";
      render(v, indent + 2, os);
    } else if (v.is_string()) {
      os << lead << " " << v.get<std::string>() << "\n";
    } else {
      os << lead << " " << v.dump() << "\n";
    }
  }
}

}  // namespace

std::string text(const json& report) {
  std::ostringstream os;
  render(report, 0, os);
  return os.str();
}

}  // namespace varcalc::report
