// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "varcalc/calculus.hpp"
#include "varcalc/catalog.hpp"
#include "varcalc/estimators.hpp"
#include "varcalc/geometry.hpp"
#include "varcalc/growth.hpp"
#include "varcalc/kernels.hpp"
#include "varcalc/problem_file.hpp"
#include "varcalc/report.hpp"

using namespace varcalc;
using json = nlohmann::ordered_json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  json record;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- independent oracles -----------------------------------------------------

// Derivative of the wiggle function between breakpoints. The slope of the linear
// correction is taken as the secant of x⁴ over [1/(n+1), 1/n].
long double wiggle_derivative_ref(long double x) {
  const long double s = x < 0 ? -1 : 1;
  x = std::fabs(x);
  const long double osc = 10.0L / 3 * std::pow(x, 7.0L / 3) * std::cos(1 / x) + std::pow(x, 4.0L / 3) * std::sin(1 / x);
  if (x > 1) return s * (osc + 4 * x * x * x);
  long n = static_cast<long>(std::floor(1 / x));
  while (x < 1.0L / (n + 1)) ++n;
  while (n > 1 && x >= 1.0L / n) --n;
  const long double a = 1.0L / (n + 1), b = 1.0L / n;
  const long double secant = (b * b * b * b - a * a * a * a) / (b - a);
  return s * (osc + secant);
}

long double oscillatory_derivative_ref(long double x) { return x == 0 ? 0 : x * x * std::sin(1 / (x * x)); }

// Strict violation of ⟨v2 − v1, x2 − x1⟩ ≥ −r|x2 − x1|² in extended precision, plus
// the ε-ball membership the lemma requires.
bool violation_confirmed(const Counterexample& ce, double eps, long double (*deriv)(long double)) {
  const long double x1 = ce.x1(0), x2 = ce.x2(0);
  const long double v1 = deriv(x1), v2 = deriv(x2);
  const bool in_ball = std::fabs(x1) < eps && std::fabs(x2) < eps && std::fabs(v1) < eps && std::fabs(v2) < eps;
  const long double dx = x2 - x1;
  return in_ball && (v2 - v1) * dx < -static_cast<long double>(ce.r) * dx * dx;
}

// λ_min of a symmetric matrix by bisection on the inertia of Q − σI (count of
// negative pivots in an LDLᵀ factorization without pivoting).
double lambda_min_ref(const Mat& Q) {
  const int n = static_cast<int>(Q.rows());
  auto negatives = [&](double sigma) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i][j] = Q(i, j) - (i == j ? sigma : 0.0);
    int count = 0;
    for (int k = 0; k < n; ++k) {
      double d = a[k][k];
      if (d == 0) d = -1e-300;
      if (d < 0) ++count;
      for (int i = k + 1; i < n; ++i) {
        const double l = a[i][k] / d;
        for (int j = k + 1; j < n; ++j) a[i][j] -= l * a[k][j];
      }
    }
    return count;
  };
  double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, Q.row(i).cwiseAbs().sum());
  double lo = -bound - 1, hi = bound + 1;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (negatives(mid) == 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ∫_a^b t² sin(1/t²) dt by composite Simpson.
double simpson_oscillatory(double a, double b, long intervals) {
  const double h = (b - a) / static_cast<double>(intervals);
  auto f = [](double t) { return t * t * std::sin(1 / (t * t)); };
  double s = f(a) + f(b);
  for (long i = 1; i < intervals; ++i) s += (i % 2 ? 4 : 2) * f(a + h * static_cast<double>(i));
  return s * h / 3;
}

// ---- shared corpus -----------------------------------------------------------

struct NlpInstance {
  std::string id;
  CompositeProblem problem;
};

std::vector<NlpInstance> nlp_corpus() {
  std::vector<NlpInstance> out;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const int n = 1 + static_cast<int>(s % 4);
    const int m = 1 + static_cast<int>((s / 4) % 3);
    const CatalogEntry e = random_nlp(s, n, m);
    out.push_back({e.id, e.problem()});
  }
  return out;
}

std::vector<CatalogEntry> qp_corpus() {
  std::vector<CatalogEntry> out;
  for (std::uint64_t s = 1; s <= 12; ++s) out.push_back(random_qp(s, 1 + static_cast<int>(s % 6)));
  return out;
}

// Unit directions from the critical cone: its generators and seeded nonnegative
// combinations of them.
std::vector<Vec> critical_directions(const CompositeProblem& p, int extra, std::mt19937_64& rng) {
  const CriticalCone K = critical_cone(p);
  std::vector<Vec> gens = K.rays;
  for (const Vec& l : K.lines) {
    gens.push_back(l);
    gens.push_back(-l);
  }
  std::vector<Vec> out = gens;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < extra && !gens.empty(); ++k) {
    Vec w = Vec::Zero(p.n());
    for (const Vec& g : gens) w += U(rng) * g;
    if (w.norm() > 1e-8) out.push_back(w / w.norm());
  }
  for (Vec& w : out) w /= w.norm();
  return out;
}

Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = N(rng);
  return w / w.norm();
}

json ext(const ExtReal& v) { return report::value(v); }

// ---- criteria ----------------------------------------------------------------

Outcome prox_counterexample(const CatalogEntry& e, long double (*deriv)(long double), const char* family) {
  Outcome o;
  const Vec zero = Vec::Zero(1);
  for (double eps : {1e-1, 1e-2}) {
    const FalsifyResult r =
        prox_regularity_falsify(e.gradient, zero, zero, 1e3, eps, ProbeStrategy::kPaperSequences);
    const bool found = r.counterexample.has_value();
    const bool from_family = found && r.counterexample->source.find(family) != std::string::npos;
    const bool confirmed = found && violation_confirmed(*r.counterexample, eps, deriv);
    o.pass = o.pass && found && from_family && confirmed;
    o.record["eps " + fmt(eps)] = report::falsify(r, confirmed);
    o.detail += "eps=" + fmt(eps) + (found ? " " + r.counterexample->source : std::string(" none")) +
                (confirmed ? " confirmed; " : " NOT confirmed; ");
  }
  return o;
}

Outcome criterion1() {
  return prox_counterexample(example_3_2(), wiggle_derivative_ref, "u_k=1/(2k pi)");
}

Outcome criterion2() {
  Outcome o = prox_counterexample(example_3_3(), oscillatory_derivative_ref, "u_k=1/sqrt(2k pi)");
  double worst = -1;
  for (int i = 0; i < 1000; ++i) {
    const double x = -1 + 2 * (i + 0.5) / 1000;
    worst = std::max(worst, std::abs(pathological::oscillatory_integral(x)) - std::abs(x * x * x) / 3);
  }
  // The quadrature itself against Simpson on [1e-3, x]; the omitted piece is below 1e-9/3.
  double quad_err = 0;
  for (double x : {0.3, 0.7, 1.0}) {
    quad_err = std::max(quad_err, std::abs(pathological::oscillatory_integral(x) - simpson_oscillatory(1e-3, x, 4'000'000)));
  }
  const bool bound_ok = worst <= 0;
  const bool quad_ok = quad_err < 1e-6;
  o.pass = o.pass && bound_ok && quad_ok;
  o.detail += "max(|f|-|x|^3/3)=" + fmt(worst) + ", quadrature vs Simpson " + fmt(quad_err);
  o.record["cubic_bound_margin"] = worst;
  o.record["quadrature_error"] = quad_err;
  return o;
}

Outcome criterion3() {
  Outcome o;
  const CompositeProblem p = example_4_6().problem();
  // MSQC: d(x, Γ) with Γ = [0, ∞) against d(F(x), R²₋) in closed form, and the library's
  // Gauss–Newton projection onto dom ψ against the exact distance.
  double msqc_gap = -1, proj_err = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -1 + 2.0 * i / 999;
    const double dG = std::max(0.0, -x);
    const double dF = std::hypot(std::max(0.0, -x), std::max(0.0, -x * x * x));
    msqc_gap = std::max(msqc_gap, dG - dF);
    Vec xv(1);
    xv << x;
    const auto proj = project_onto_domain(p, xv);
    proj_err = std::max(proj_err, proj ? std::abs((*proj - xv).norm() - dG) : 1.0);
  }
  double qg_gap = kInf;
  for (int i = 0; i <= 1000; ++i) {
    Vec xv(1);
    xv << i / 1000.0;
    qg_gap = std::min(qg_gap, eval_f(p, xv).value() - p.f_bar() - xv(0) * xv(0));
  }
  const Generators L = vertex_enumerate(multiplier_set(p).set);
  const bool lam_ok = L.points.size() == 1 && (L.points[0] - vec2(2, 0)).norm() < 1e-12 && L.rays.size() == 1 &&
                      (L.rays[0].normalized() - vec2(0, 1)).norm() < 1e-12 && L.lines.empty();
  const double tau = tau_bound(p, 1.0, p.polyhedral().lipschitz());
  const TauAttainment ta = tau_attainment(p, Vec::Zero(1), tau);
  const bool tau_ok = std::abs(tau - 2) < 1e-12 && ta.attained && (ta.point - vec2(2, 0)).norm() < 1e-9 &&
                      ta.norm <= tau + 1e-9;
  const GrowthReport gr = thm43_battery(p);
  bool all_hold = gr.consistency;
  int determined = 0;
  for (const Condition& c : gr.cond) {
    if (c.verdict == Verdict::kUndetermined) continue;
    ++determined;
    all_hold = all_hold && c.verdict == Verdict::kHolds;
  }
  o.pass = msqc_gap <= 1e-12 && proj_err <= 1e-12 && qg_gap >= 0 && lam_ok && tau_ok && all_hold && determined > 0;
  o.detail = "msqc gap " + fmt(msqc_gap) + ", projection error " + fmt(proj_err) + ", qg margin " + fmt(qg_gap) +
             ", Lambda " + (lam_ok ? "ok" : "WRONG") + ", tau " + fmt(tau) + " via " + ta.method + ", battery " +
             std::to_string(determined) + " determined, " + (all_hold ? "all hold" : "NOT all hold");
  o.record["msqc_gap"] = msqc_gap;
  o.record["qg_margin"] = qg_gap;
  o.record["multipliers"] = report::value(L);
  o.record["tau"] = tau;
  o.record["tau_point"] = report::value(ta.point);
  o.record["growth"] = report::growth(gr);
  return o;
}

GridSchedule sum_rule_schedule() {
  GridSchedule s;
  s.t0 = 1e-4;
  s.ratio = 0.5;
  s.levels = 6;
  s.c = 8;
  s.directions = 64;
  s.refine_evals = 2048;
  s.divergence_threshold = 1e3;
  s.seed = 11;
  return s;
}

Outcome criterion4() {
  Outcome o;
  const GridSchedule sched = sum_rule_schedule();
  int total = 0, agree = 0;
  json exceptions = json::array();
  std::mt19937_64 rng(2024);
  for (const NlpInstance& inst : nlp_corpus()) {
    const CompositeProblem& p = inst.problem;
    std::vector<Vec> dirs = critical_directions(p, 10, rng);
    if (dirs.size() > 10) dirs.resize(10);
    while (dirs.size() < 20) dirs.push_back(random_unit(p.n(), rng));
    const Evaluable f = make_evaluable(p);
    const Vec zero = Vec::Zero(p.n());
    for (const Vec& w : dirs) {
      ++total;
      const ExtReal exact = sum_rule_second_subderivative(p, w);
      const LiminfEstimate est = est_second_subderivative(f, p.x_bar(), zero, w, sched);
      bool ok;
      if (exact.is_infinite()) {
        ok = est.diverging;
      } else {
        ok = !est.diverging && est.value.is_finite() &&
             std::abs(est.value.value() - exact.value()) <= 1e-2 * std::max(1.0, std::abs(exact.value()));
      }
      if (ok) {
        ++agree;
      } else {
        exceptions.push_back({{"instance", inst.id},
                              {"w", report::value(w)},
                              {"formula", ext(exact)},
                              {"estimate", ext(est.value)},
                              {"diverging", est.diverging}});
      }
    }
  }
  const double rate = static_cast<double>(agree) / total;
  o.pass = rate >= 0.98;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (" + fmt(100 * rate) + "%)";
  for (const auto& ex : exceptions) {
    o.detail += "\n        grid-resolution exception: " + ex.dump();
  }
  o.record["agree"] = agree;
  o.record["total"] = total;
  o.record["exceptions"] = exceptions;
  return o;
}

Outcome criterion5() {
  Outcome o;
  int checked = 0, instances = 0, attained = 0;
  double worst_gap = 0;
  std::mt19937_64 rng(5);
  std::vector<NlpInstance> corpus = nlp_corpus();
  corpus.push_back({"example_4_6", example_4_6().problem()});
  for (const NlpInstance& inst : corpus) {
    const CompositeProblem& p = inst.problem;
    ++instances;
    const MsqcResult ms = msqc_check(p, 0.1, 256);
    const double tau = tau_bound(p, msqc_kappa(ms), p.polyhedral().lipschitz());
    std::vector<Vec> dirs = critical_directions(p, 6, rng);
    dirs.push_back(Vec::Zero(p.n()));
    bool inst_ok = true;
    json rec = json::array();
    for (const Vec& w : dirs) {
      const DualPair dp = d2_psi_dual_pair(p, w);
      const TauAttainment ta = tau_attainment(p, w, tau);
      ++checked;
      double gap = kInf;
      if (dp.primal.is_finite() && dp.dual.is_finite()) gap = std::abs(dp.primal.value() - dp.dual.value());
      if (dp.primal.is_infinite() && dp.dual.is_infinite()) gap = 0;
      worst_gap = std::max(worst_gap, gap);
      inst_ok = inst_ok && ta.attained;
      rec.push_back({{"w", report::value(w)}, {"primal", ext(dp.primal)}, {"dual", ext(dp.dual)}, {"tau_attained", ta.attained}});
    }
    attained += inst_ok;
    o.record[inst.id] = rec;
  }
  o.pass = worst_gap <= 1e-8 && attained == instances;
  o.detail = std::to_string(checked) + " critical directions, max |primal-dual| " + fmt(worst_gap) +
             ", tau attainment " + std::to_string(attained) + "/" + std::to_string(instances);
  return o;
}

Outcome criterion6() {
  Outcome o;
  int checked = 0;
  double worst = 0;
  bool all_z = true;
  std::mt19937_64 rng(6);
  std::vector<NlpInstance> corpus = nlp_corpus();
  corpus.push_back({"example_4_6", example_4_6().problem()});
  for (const NlpInstance& inst : corpus) {
    const CompositeProblem& p = inst.problem;
    std::vector<Vec> dirs = critical_directions(p, 6, rng);
    dirs.push_back(Vec::Zero(p.n()));
    json rec = json::array();
    for (const Vec& w : dirs) {
      const ParabolicRegularity pr = parabolic_regularity_check(p, w);
      ++checked;
      double gap = kInf;
      bool z_ok = pr.z_bar.size() == p.n();
      if (pr.lhs.is_finite() && pr.rhs.is_finite()) gap = std::abs(pr.lhs.value() - pr.rhs.value());
      // Second route: the parabolic chain rule at z̄ minus ⟨v̄, z̄⟩ must reproduce d²ψ.
      if (z_ok) {
        const ExtReal par = chain_rule_parabolic(p, w, pr.z_bar);
        const ExtReal d2 = d2_psi_max_formula(p, w).value;
        if (par.is_infinite() || d2.is_infinite()) {
          gap = kInf;
        } else {
          gap = std::max(gap, std::abs(par.value() - p.v_bar().dot(pr.z_bar) - d2.value()));
        }
      }
      all_z = all_z && z_ok;
      worst = std::max(worst, gap);
      rec.push_back({{"w", report::value(w)}, {"lhs", ext(pr.lhs)}, {"rhs", ext(pr.rhs)}});
    }
    o.record[inst.id] = rec;
  }
  o.pass = worst <= 1e-8 && all_z;
  o.detail = std::to_string(checked) + " critical directions, max |lhs-rhs| " + fmt(worst) +
             (all_z ? ", minimizer recovered everywhere" : ", minimizer MISSING");
  return o;
}

Outcome criterion7() {
  Outcome o;
  double worst = 0;
  bool sms_ok = true;
  for (const CatalogEntry& e : qp_corpus()) {
    const CompositeProblem p = e.problem();
    const double lmin = lambda_min_ref(p.hess_phi());
    const QgModulus m = qg_modulus(p);
    double err = kInf;
    if (m.lower.is_finite() && m.upper.is_finite()) {
      err = std::max(std::abs(m.lower.value() - lmin), std::abs(m.upper.value() - lmin));
    }
    worst = std::max(worst, err);
    const SampleCheck sc = sms_sample_check(p, 1.0 / lmin * (1 + 1e-6), 0.05, 512);
    sms_ok = sms_ok && sc.holds && sc.samples > 0;
    o.record[e.id] = {{"lambda_min", lmin}, {"lower", ext(m.lower)}, {"upper", ext(m.upper)}, {"sms_worst", sc.worst_ratio}};
  }
  o.pass = worst <= 1e-6 && sms_ok;
  o.detail = "12 quadratics, max |modulus - lambda_min| " + fmt(worst) + ", SMS " + (sms_ok ? "holds" : "VIOLATED");
  return o;
}

Outcome criterion8() {
  Outcome o;
  int instances = 0, mismatches = 0, determined = 0;
  std::string bad;
  auto run = [&](const std::string& id, const CompositeProblem& p, const GrowthBudget& b) {
    const GrowthReport r = thm43_battery(p, b);
    ++instances;
    for (const Condition& c : r.cond) determined += c.verdict != Verdict::kUndetermined;
    if (!r.consistency) {
      ++mismatches;
      bad += " " + id;
    }
    std::string verdicts;
    for (const Condition& c : r.cond) verdicts += to_string(c.verdict) + " ";
    o.record[id] = verdicts;
  };
  for (const NlpInstance& inst : nlp_corpus()) run(inst.id, inst.problem, {});
  for (const CatalogEntry& e : qp_corpus()) run(e.id, e.problem(), {});
  for (const std::string& id : catalog_ids()) run(id, catalog_entry(id).problem(), {});
  for (const char* name : {"quadratic", "halfline", "saddle_box", "example_4_6", "example_3_2", "example_3_3"}) {
    const ProblemFile pf = load_problem(std::string(VARCALC_PROBLEMS_DIR) + "/" + name + ".json");
    run(std::string("problems/") + name, *pf.problem, pf.options.budget);
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(determined) + " determined verdicts, " +
             std::to_string(mismatches) + " inconsistent" + bad;
  return o;
}

// Catalog g's with points of their domains chosen on kinks and faces.
struct GCase {
  std::string name;
  PolyhedralFn g;
};

std::vector<GCase> g_catalog() {
  Mat A(2, 3);
  A << 1, 1, 1, -1, 0, 1;
  Mat S(4, 3);
  S << 1, 0, 0, 0, 1, 0, 0, 0, 1, -1, -1, -1;
  Vec off(4);
  off << 0, 0, 0.5, 0;
  Mat E(1, 3);
  E << 1, -1, 0;
  Vec lo(6);
  lo << 1, 1, 1, 1, 1, 1;
  Mat box(6, 3);
  box << Mat::Identity(3, 3), -Mat::Identity(3, 3);
  Polyhedron withEq = Polyhedron(A, Vec::Zero(2)).intersect(Polyhedron(E, Vec::Zero(1), {true}));
  return {
      {"indicator nonpositive orthant", PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(3))},
      {"indicator box", PolyhedralFn::indicator(Polyhedron(box, lo))},
      {"indicator cone with equality", PolyhedralFn::indicator(withEq)},
      {"max affine", PolyhedralFn::max_affine(S, off)},
      {"l1", PolyhedralFn::l1(3)},
      {"l1 on coordinates", PolyhedralFn::l1_on(3, {0, 2})},
      {"linf", PolyhedralFn::linf(3)},
      {"affine", PolyhedralFn::affine(Vec::Ones(3), 0.25)},
      {"zero", PolyhedralFn::zero(3)},
      {"sum", PolyhedralFn::sum({PolyhedralFn::l1(3), PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(3))})},
  };
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> Q(-4, 4);
  auto dyadic = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = Q(rng) / 4.0;
    return v;
  };
  int checked = 0, mismatches = 0, in_a = 0;
  std::string first_bad;
  const auto cases = g_catalog();
  for (const GCase& gc : cases) {
    const PolyhedralFn& g = gc.g;
    int made = 0;
    json rec = json::array();
    for (int attempt = 0; made < 100 && attempt < 20000; ++attempt) {
      Vec y = dyadic(3);
      for (int i = 0; i < 3; ++i)
        if (rng() % 2) y(i) = 0;
      // The equality-constrained cone lives on y0 = y1.
      if (rng() % 2) y(1) = y(0);
      if (g.value(y, 0.0).is_infinite()) continue;
      Vec u = dyadic(3);
      if (rng() % 2) u(1) = u(0);
      if (g.directional(y).value(u).is_infinite()) continue;
      // Half of the v's are built inside A(y,u) = argmax{⟨v,u⟩ : v ∈ ∂g(y)}.
      Vec v = dyadic(3);
      if (made % 2 == 0) {
        const Generators G = g.subgradients(y, 0.0);
        double top = -kInf;
        for (const Vec& pt : G.points) top = std::max(top, pt.dot(u));
        Vec acc = Vec::Zero(3);
        int cnt = 0;
        for (const Vec& pt : G.points) {
          if (pt.dot(u) >= top - 1e-12 && (rng() % 2 || cnt == 0)) {
            acc += pt;
            ++cnt;
          }
        }
        v = acc / cnt;
        for (const Vec& r : G.rays)
          if (std::abs(r.dot(u)) <= 1e-12) v += static_cast<double>(rng() % 3) * r;
        for (const Vec& l : G.lines)
          if (std::abs(l.dot(u)) <= 1e-12) v += static_cast<double>(Q(rng)) * l;
      }
      const ConjugateCheck cc = g_parabolic_conjugate_check(g, y, u, v);
      const bool binary = (cc.lhs.is_infinite() || cc.lhs.value() == 0) && (cc.rhs.is_infinite() || cc.rhs.value() == 0);
      const bool ok = binary && cc.lhs == cc.rhs;
      if (!ok && mismatches == 0) {
        first_bad = gc.name + " y=" + report::value(y).dump() + " u=" + report::value(u).dump() + " v=" +
                    report::value(v).dump() + " lhs=" + cc.lhs.to_string() + " rhs=" + cc.rhs.to_string();
      }
      mismatches += !ok;
      in_a += cc.rhs.is_finite();
      ++checked;
      ++made;
      rec.push_back({ext(cc.lhs), ext(cc.rhs)});
    }
    if (made < 100) {
      ++mismatches;
      first_bad += gc.name + ": only " + std::to_string(made) + " triples generated; ";
    }
    o.record[gc.name] = rec;
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(cases.size()) + " catalog g, " + std::to_string(checked) + " triples (" +
             std::to_string(in_a) + " with v in A), " + std::to_string(mismatches) + " mismatches" +
             (first_bad.empty() ? "" : "; first: " + first_bad);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double time_limit;  // seconds, 0 = none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "prox-regularity counterexample, wiggle function", criterion1, 1.0},
      {2, "prox-regularity counterexample and cubic bound, oscillatory integral", criterion2, 0},
      {3, "strong local minimizer example: MSQC, QG, multipliers, tau, battery", criterion3, 5.0},
      {4, "second subderivative: grid estimator vs sum rule", criterion4, 60.0},
      {5, "primal and dual LP values of d2 psi, tau-ball attainment", criterion5, 0},
      {6, "parabolic regularity with explicit minimizer", criterion6, 0},
      {7, "quadratic ground truth for the growth modulus and SMS", criterion7, 0},
      {8, "growth battery consistency over corpus and catalog", criterion8, 0},
      {9, "conjugate of the parabolic subderivative is the indicator of A(y,u)", criterion9, 0},
  };
  using clock = std::chrono::steady_clock;
  int failures = 0;
  std::vector<std::string> first_run;
  for (const Criterion& c : criteria) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
      o.record = o.detail;
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    const bool timely = c.time_limit == 0 || secs < c.time_limit;
    const bool pass = o.pass && timely;
    failures += !pass;
    first_run.push_back(o.record.dump());
    std::printf("%s [%d] %s (%.2f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                timely ? "" : ", over time limit", o.detail.c_str());
    std::fflush(stdout);
  }

  // Determinism: rerun every criterion and compare the serialized records byte for byte,
  // once more on the default backend and once on the serial reference kernels.
  {
    const auto t0 = clock::now();
    int differing = 0;
    std::string which;
    for (auto b : {kernels::backend(), kernels::Backend::kSerial}) {
      const auto saved = kernels::backend();
      kernels::set_backend(b);
      for (size_t i = 0; i < criteria.size(); ++i) {
        std::string again;
        try {
          again = criteria[i].run().record.dump();
        } catch (const std::exception& e) {
          again = json(std::string("exception: ") + e.what()).dump();
        }
        if (again != first_run[i]) {
          ++differing;
          which += " " + std::to_string(criteria[i].id) + (b == kernels::Backend::kSerial ? "(serial)" : "");
        }
      }
      kernels::set_backend(saved);
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    const bool pass = differing == 0;
    failures += !pass;
    std::printf("%s [10] byte-identical JSON records on repeated runs (%.2f s): %d differing%s\n",
                pass ? "PASS" : "FAIL", secs, differing, which.c_str());
  }
  return failures;
}
