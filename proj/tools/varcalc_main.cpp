#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "varcalc/calculus.hpp"
#include "varcalc/catalog.hpp"
#include "varcalc/growth.hpp"
#include "varcalc/problem_file.hpp"
#include "varcalc/report.hpp"

using namespace varcalc;
using report::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitUndetermined = 3;

struct Common {
  bool json_out = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> fd_grad;
  std::optional<double> fd_hess;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.json_out, "Emit the JSON report instead of text");
  sub->add_option("--seed", c.seed, "Seed (overrides VARCALC_SEED and the file)");
  sub->add_option("--fd-grad-step", c.fd_grad, "Relative finite-difference step for gradients")->check(CLI::PositiveNumber);
  sub->add_option("--fd-hess-step", c.fd_hess, "Relative finite-difference step for Hessians")->check(CLI::PositiveNumber);
}

std::optional<std::uint64_t> resolve_seed(const Common& c) {
  if (c.seed) return c.seed;
  if (const char* env = std::getenv("VARCALC_SEED")) {
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw InconsistentInput(std::string("VARCALC_SEED is not an unsigned integer: ") + env);
    }
  }
  return std::nullopt;
}

ProblemFile load(const std::string& path, const Common& c) {
  std::optional<FdSteps> fd;
  if (c.fd_grad || c.fd_hess) {
    FdSteps s;
    if (c.fd_grad) s.grad_rel = *c.fd_grad;
    if (c.fd_hess) s.hess_rel = *c.fd_hess;
    fd = s;
  }
  return load_problem(path, resolve_seed(c), fd);
}

Vec parse_vec(const std::string& text, int n, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InconsistentInput(flag + ": not a number: '" + part + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n) {
    throw InconsistentInput(flag + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return Eigen::Map<Vec>(vals.data(), n);
}

void emit(const json& j, bool as_json) {
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << report::text(j);
  }
}

json problem_summary(const ProblemFile& pf) {
  const CompositeProblem& p = *pf.problem;
  json j;
  j["n"] = pf.n;
  j["m"] = pf.m;
  j["g"] = p.polyhedral().describe();
  j["x_bar"] = report::value(p.x_bar());
  j["f_bar"] = p.f_bar();
  j["v_bar_psi"] = report::value(p.v_bar());
  return j;
}

// f-level subgradient v becomes the ψ-level v − ∇φ(x̄).
CompositeProblem at_subgradient(const CompositeProblem& p, const std::optional<std::string>& v_text) {
  if (!v_text) return p;
  const Vec v = parse_vec(*v_text, p.n(), "--v");
  return with_v_bar(p, v - p.grad_phi());
}

int cmd_analyze(const std::string& file, const Common& c) {
  const ProblemFile pf = load(file, c);
  const CompositeProblem& p = *pf.problem;
  json out = report::header("analyze", pf.options.seed);
  out["problem"] = problem_summary(pf);
  Generators lam;
  try {
    lam = multiplier_generators(p);
  } catch (const InconsistentInput& e) {
    throw InconsistentInput(std::string("x_bar is not stationary: ") + e.what());
  }
  out["multipliers"] = report::value(lam);

  const MsqcResult ms = msqc_check(p, pf.options.msqc_radius, pf.options.msqc_samples, std::nullopt, pf.options.seed);
  json mj;
  mj["kappa_estimate"] = ms.kappa_est;
  mj["samples_outside_domain"] = ms.samples;
  mj["projection_stalls"] = ms.stalls;
  mj["note"] = "d(x, dom psi) is a local Gauss-Newton estimate";
  out["msqc"] = mj;
  const double kappa = msqc_kappa(ms);
  const double tau = tau_bound(p, kappa, p.polyhedral().lipschitz());
  out["tau"] = {{"value", tau}, {"kappa", kappa}, {"heuristic", ms.samples > 0}};

  const CriticalCone K = critical_cone(p);
  json kj;
  kj["rays"] = json::array();
  for (const Vec& r : K.rays) kj["rays"].push_back(report::value(r));
  kj["lines"] = json::array();
  for (const Vec& l : K.lines) kj["lines"].push_back(report::value(l));
  out["critical_cone"] = kj;

  json checks = json::array();
  std::vector<Vec> dirs = K.rays;
  for (const Vec& l : K.lines) {
    dirs.push_back(l);
    dirs.push_back(-l);
  }
  if (dirs.empty()) dirs.push_back(Vec::Zero(p.n()));
  if (dirs.size() > 16) dirs.resize(16);
  for (const Vec& w : dirs) {
    json cj;
    cj["w"] = report::value(w);
    try {
      const DualPair dp = d2_psi_dual_pair(p, w);
      cj["primal"] = report::value(dp.primal);
      cj["dual"] = report::value(dp.dual);
      const ParabolicRegularity pr = parabolic_regularity_check(p, w);
      cj["parabolic_lhs"] = report::value(pr.lhs);
      cj["parabolic_rhs"] = report::value(pr.rhs);
      if (pr.z_bar.size()) cj["z_bar"] = report::value(pr.z_bar);
      const TauAttainment ta = tau_attainment(p, w, tau);
      cj["tau_attained"] = ta.attained;
      cj["tau_method"] = ta.method;
    } catch (const Error& e) {
      cj["error"] = e.what();
    }
    checks.push_back(cj);
  }
  out["calculus_checks"] = checks;

  const GrowthReport gr = thm43_battery(p, pf.options.budget);
  out["growth"] = report::growth(gr);
  emit(out, c.json_out);
  bool any_determined = false;
  for (const Condition& cd : gr.cond) any_determined = any_determined || cd.verdict != Verdict::kUndetermined;
  return any_determined ? kExitOk : kExitUndetermined;
}

int cmd_d2(const std::string& file, const std::string& w_text, const std::optional<std::string>& v_text,
           const Common& c) {
  const ProblemFile pf = load(file, c);
  const CompositeProblem p = at_subgradient(*pf.problem, v_text);
  const Vec w = parse_vec(w_text, p.n(), "--w");
  json out = report::header("d2", pf.options.seed);
  out["w"] = report::value(w);
  out["critical"] = is_critical(p, w);
  out["d2"] = report::value(sum_rule_second_subderivative(p, w));
  out["d2_psi"] = report::max_formula(d2_psi_max_formula(p, w));
  emit(out, c.json_out);
  return kExitOk;
}

int cmd_parabolic(const std::string& file, const std::string& w_text, const std::string& z_text, const Common& c) {
  const ProblemFile pf = load(file, c);
  const CompositeProblem& p = *pf.problem;
  const Vec w = parse_vec(w_text, p.n(), "--w");
  const Vec z = parse_vec(z_text, p.n(), "--z");
  json out = report::header("parabolic", pf.options.seed);
  out["w"] = report::value(w);
  out["z"] = report::value(z);
  out["parabolic"] = report::value(sum_rule_parabolic(p, w, z));
  out["parabolic_psi"] = report::value(chain_rule_parabolic(p, w, z));
  emit(out, c.json_out);
  return kExitOk;
}

void apply_schedule(GridSchedule& s, const std::string& text) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InconsistentInput("--schedule: expected key=value, got '" + item + "'");
    const std::string k = item.substr(0, eq);
    double v = 0;
    try {
      v = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InconsistentInput("--schedule: bad value in '" + item + "'");
    }
    if (k == "t0") s.t0 = v;
    else if (k == "ratio") s.ratio = v;
    else if (k == "levels") s.levels = static_cast<int>(v);
    else if (k == "c") s.c = v;
    else if (k == "directions") s.directions = static_cast<int>(v);
    else if (k == "refine_evals") s.refine_evals = static_cast<int>(v);
    else if (k == "divergence_threshold") s.divergence_threshold = v;
    else throw InconsistentInput("--schedule: unknown key '" + k + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw InconsistentInput(std::string("--schedule: ") + e.what());
  }
}

int cmd_estimate(const std::string& file, const std::string& object, const std::string& w_text,
                 const std::optional<std::string>& v_text, const std::optional<std::string>& z_text,
                 const std::optional<std::string>& schedule, const std::optional<std::string>& csv, const Common& c) {
  const ProblemFile pf = load(file, c);
  const CompositeProblem& p = *pf.problem;
  GridSchedule s = pf.options.schedule;
  if (schedule) apply_schedule(s, *schedule);
  const Vec w = parse_vec(w_text, p.n(), "--w");
  const Evaluable f = make_evaluable(p, 0.0);
  LiminfEstimate e;
  json out = report::header("estimate", pf.options.seed);
  out["object"] = object;
  out["w"] = report::value(w);
  if (object == "subderivative") {
    e = est_subderivative(f, p.x_bar(), w, s);
  } else if (object == "d2") {
    const Vec v = v_text ? parse_vec(*v_text, p.n(), "--v") : Vec(Vec::Zero(p.n()));
    out["v"] = report::value(v);
    e = est_second_subderivative(f, p.x_bar(), v, w, s);
  } else {
    if (!z_text) throw InconsistentInput("--object parabolic needs --z");
    const Vec z = parse_vec(*z_text, p.n(), "--z");
    const ExtReal df = ExtReal(p.grad_phi().dot(w)) + g_subderivative(p.polyhedral(), p.F_bar(), p.jacobian() * w);
    if (df.is_infinite()) throw DomainError("df(x_bar)(w) = +inf: w is not tangent to dom f");
    out["z"] = report::value(z);
    out["df"] = df.value();
    e = est_parabolic_subderivative(f, p.x_bar(), w, df.value(), z, s);
  }
  out["estimate"] = report::estimate(e);
  out["semantics"] = e.diverging ? "consistent with +inf (diverging)" : "finite value is an upper bound on the liminf";
  if (csv) {
    std::ofstream os(*csv);
    if (!os) throw InconsistentInput("cannot write " + *csv);
    write_witness_csv(e, os);
  }
  emit(out, c.json_out);
  return kExitOk;
}

int cmd_falsify(const std::string& file, double r_max, std::vector<double> eps, const std::string& strategy,
                const Common& c) {
  const ProblemFile pf = load(file, c);
  const CompositeProblem& p = *pf.problem;
  if (eps.empty()) eps = {1e-1, 1e-2, 1e-3};
  const ProbeStrategy st = strategy == "pair-grid" ? ProbeStrategy::kPairGrid : ProbeStrategy::kPaperSequences;
  const GradientProbe grad = pf.gradient();
  const Vec v_bar = p.grad_phi() + p.jacobian().transpose() * multiplier_set(p).member;
  json out = report::header("falsify-prox", pf.options.seed);
  out["strategy"] = to_string(st);
  out["r_max"] = r_max;
  out["v_bar"] = report::value(v_bar);
  json runs = json::array();
  for (double e : eps) {
    const FalsifyResult r = prox_regularity_falsify(grad, p.x_bar(), v_bar, r_max, e, st, pf.options.falsify);
    const bool ok = r.counterexample && verify_counterexample(grad, *r.counterexample);
    runs.push_back(report::falsify(r, ok));
  }
  out["runs"] = runs;
  emit(out, c.json_out);
  return kExitOk;
}

int cmd_catalog_list(const Common& c) {
  json out = report::header("catalog list", 0);
  json ids = json::array();
  for (const std::string& id : catalog_ids()) ids.push_back({{"id", id}, {"description", catalog_entry(id).description}});
  ids.push_back({{"id", "random_qp:<seed>:<n>"}, {"description", "seeded positive definite quadratic"}});
  ids.push_back({{"id", "random_nlp:<seed>:<n>:<m>"}, {"description", "seeded stationary composite problem"}});
  out["entries"] = ids;
  emit(out, c.json_out);
  return kExitOk;
}

int cmd_catalog_run(const std::string& id, const Common& c) {
  const auto seed = resolve_seed(c);
  const CatalogEntry e = catalog_entry(id);
  json out = report::header("catalog run", seed.value_or(7));
  bool ok = true;
  out["entry"] = report::catalog_run(e, ok);
  out["all_facts_reproduced"] = ok;
  emit(out, c.json_out);
  return ok ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order variational analysis of composite problems phi + g(F)"};
  app.set_version_flag("--version", std::string("varcalc ") + VARCALC_VERSION);
  app.require_subcommand(1);
  Common common;
  std::string file, w, z, object = "d2", strategy = "paper-sequences";
  std::optional<std::string> v, zopt, schedule, csv, id;
  double r_max = 1e3;
  std::vector<double> eps;

  auto* analyze = app.add_subcommand("analyze", "Run the growth battery and calculus cross-checks");
  analyze->add_option("file", file, "Problem file")->required();
  add_common(analyze, common);

  auto* d2 = app.add_subcommand("d2", "Second subderivative by the sum and chain rules");
  d2->add_option("file", file, "Problem file")->required();
  d2->add_option("--w", w, "Direction, comma-separated")->required()->allow_extra_args(false);
  d2->add_option("--v", v, "Subgradient of f (default 0)");
  add_common(d2, common);

  auto* para = app.add_subcommand("parabolic", "Parabolic subderivative by the sum and chain rules");
  para->add_option("file", file, "Problem file")->required();
  para->add_option("--w", w, "Direction")->required();
  para->add_option("--z", z, "Second-order direction")->required();
  add_common(para, common);

  auto* est = app.add_subcommand("estimate", "Sampling estimate of a derivative object");
  est->add_option("file", file, "Problem file")->required();
  est->add_option("--object", object, "subderivative | d2 | parabolic")
      ->check(CLI::IsMember({"subderivative", "d2", "parabolic"}));
  est->add_option("--w", w, "Direction")->required();
  est->add_option("--v", v, "Subgradient for d2 (default 0)");
  est->add_option("--z", zopt, "Second-order direction for parabolic");
  est->add_option("--schedule", schedule, "key=value list: t0, ratio, levels, c, directions, refine_evals");
  est->add_option("--witness-csv", csv, "Write witnesses as CSV");
  add_common(est, common);

  auto* fal = app.add_subcommand("falsify-prox", "Search for a pair violating the prox-regularity inequality");
  fal->add_option("file", file, "Problem file")->required();
  fal->add_option("--r-max", r_max, "Largest r tested")->check(CLI::PositiveNumber);
  fal->add_option("--eps", eps, "Ball radii (default 1e-1 1e-2 1e-3)")->check(CLI::PositiveNumber);
  fal->add_option("--strategy", strategy, "paper-sequences | pair-grid")
      ->check(CLI::IsMember({"paper-sequences", "pair-grid"}));
  add_common(fal, common);

  auto* cat = app.add_subcommand("catalog", "Built-in instances");
  cat->require_subcommand(1);
  auto* list = cat->add_subcommand("list", "List catalog ids");
  add_common(list, common);
  auto* run = cat->add_subcommand("run", "Reproduce the expected facts of an entry");
  run->add_option("id", id, "Catalog id")->required();
  add_common(run, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(file, common);
    if (d2->parsed()) return cmd_d2(file, w, v, common);
    if (para->parsed()) return cmd_parabolic(file, w, z, common);
    if (est->parsed()) return cmd_estimate(file, object, w, v, zopt, schedule, csv, common);
    if (fal->parsed()) return cmd_falsify(file, r_max, eps, strategy, common);
    if (list->parsed()) return cmd_catalog_list(common);
    if (run->parsed()) return cmd_catalog_run(*id, common);
  } catch (const SchemaError& e) {
    std::cerr << "invalid problem file: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InconsistentInput& e) {
    std::cerr << "inconsistent input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DimensionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const EvalError& e) {
    std::cerr << "evaluation failed: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const CapacityError& e) {
    std::cerr << "problem exceeds desk-scale limits: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
