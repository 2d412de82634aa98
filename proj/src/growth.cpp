#include "varcalc/growth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "varcalc/estimators.hpp"
#include "varcalc/geometry.hpp"

namespace varcalc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kFails: return "fails";
    case Verdict::kUndetermined: return "undetermined";
  }
  return "?";
}

Verdict verdict_and(Verdict a, Verdict b) {
  if (a == Verdict::kFails || b == Verdict::kFails) return Verdict::kFails;
  if (a == Verdict::kHolds && b == Verdict::kHolds) return Verdict::kHolds;
  return Verdict::kUndetermined;
}

ExtReal Lagrangian::value(const Vec& x, const Vec& y) const {
  const ExtReal gs = g_conjugate(p_.polyhedral(), y);
  if (gs.is_infinite()) throw DomainError("Lagrangian: y outside dom g*");
  return ExtReal(p_.phi_value(x) + p_.F().value(x).dot(y) - gs.value());
}

Mat Lagrangian::hessian_xx(const Vec& y) const {
  Mat H = p_.hess_phi() + weighted_F_hessian(p_, y);
  return 0.5 * (H + H.transpose());
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::vector<Vec> lambda_rays(const Generators& lam) {
  std::vector<Vec> rays = lam.rays;
  for (const Vec& l : lam.lines) {
    rays.push_back(l);
    rays.push_back(-l);
  }
  return rays;
}

// Exact min of ⟨w,Qw⟩ over unit w in K: the minimizer is an eigenvector of the
// face-restricted form on the face whose relative interior contains it.
struct FaceMin {
  double value = std::numeric_limits<double>::infinity();
  Vec argmin;
};

struct Face {
  std::vector<int> rays;   // indices into K's rays
  std::vector<int> tight;  // inequality rows tight on the face
};

FaceMin exact_min_on_faces(const Mat& Q, const std::vector<Face>& faces, const std::vector<Vec>& rays,
                           const std::vector<Vec>& lines, const Mat& Ai, const Mat& E, int n) {
  FaceMin best;
  const Mat Qs = 0.5 * (Q + Q.transpose());
  for (const Face& f : faces) {
    std::vector<Vec> gens;
    for (int r : f.rays) gens.push_back(rays[static_cast<size_t>(r)]);
    gens.insert(gens.end(), lines.begin(), lines.end());
    const Mat B = orthonormal_span(gens, n);
    if (B.cols() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(B.transpose() * Qs * B));
    const Vec& ev = es.eigenvalues();
    if (ev(0) >= best.value) continue;
    std::vector<bool> is_tight(static_cast<size_t>(Ai.rows()), false);
    for (int t : f.tight) is_tight[static_cast<size_t>(t)] = true;
    const double ctol = 1e-9 * (1.0 + ev.cwiseAbs().maxCoeff());
    for (int j = 0; j < ev.size();) {
      int k = j;
      while (k < ev.size() && ev(k) - ev(j) <= ctol) ++k;
      if (ev(j) >= best.value) break;
      const Mat V = B * es.eigenvectors().middleCols(j, k - j);
      std::vector<int> ineq_rows, eq_rows;
      for (int i = 0; i < Ai.rows(); ++i) (is_tight[static_cast<size_t>(i)] ? eq_rows : ineq_rows).push_back(i);
      Mat I(static_cast<Eigen::Index>(ineq_rows.size()), V.cols());
      Mat Q2(static_cast<Eigen::Index>(eq_rows.size()) + E.rows(), V.cols());
      for (size_t r = 0; r < ineq_rows.size(); ++r) I.row(static_cast<Eigen::Index>(r)) = Ai.row(ineq_rows[r]) * V;
      for (size_t r = 0; r < eq_rows.size(); ++r) Q2.row(static_cast<Eigen::Index>(r)) = Ai.row(eq_rows[r]) * V;
      for (Eigen::Index r = 0; r < E.rows(); ++r) Q2.row(static_cast<Eigen::Index>(eq_rows.size()) + r) = E.row(r) * V;
      const ConeGenerators cg = cone_generators(I, Q2, static_cast<int>(V.cols()));
      std::optional<Vec> w;
      if (!cg.rays.empty()) w = V * cg.rays.front();
      else if (!cg.lines.empty()) w = V * cg.lines.front();
      if (w && w->norm() > 1e-12) {
        best.value = ev(j);
        best.argmin = *w / w->norm();
        break;
      }
      j = k;
    }
  }
  return best;
}

}  // namespace

ExtReal critical_quadratic_value(const CompositeProblem& p, const Generators& lambda, const Vec& w) {
  const Vec q = second_order_term(p.F_hessians(), w);
  const double tol = 1e-9 * (1.0 + q.norm());
  for (const Vec& r : lambda_rays(lambda)) {
    if (r.dot(q) > tol) return ExtReal::infinity();
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& y : lambda.points) best = std::max(best, y.dot(q));
  return ExtReal(w.dot(p.hess_phi() * w) + best);
}

CriticalQuadratic analyze_critical_quadratic(const CompositeProblem& p, const GrowthBudget& budget) {
  CriticalQuadratic out;
  const int n = p.n();
  const CriticalCone K = critical_cone(p);
  if (K.is_zero()) {
    out.vacuous = true;
    out.exact = true;
    out.lower = out.upper = std::numeric_limits<double>::infinity();
    return out;
  }
  const Generators lam = multiplier_generators(p);
  out.multiplier_vertices = static_cast<int>(lam.points.size());
  const Lagrangian L(p);
  std::vector<Mat> forms;
  double scale = 1.0;
  for (const Vec& y : lam.points) {
    forms.push_back(L.hessian_xx(y));
    scale = std::max(scale, forms.back().cwiseAbs().maxCoeff());
  }
  out.tol = 1e-9 * scale;

  Mat Ai, E;
  Vec bi, d;
  K.cone.polyhedron().split(Ai, bi, E, d);

  // Faces of K by successive tightening of inequality rows.
  std::vector<Face> faces;
  bool overflow = static_cast<int>(lam.points.size()) > budget.max_vertices;
  {
    auto tight_on = [&](int row, const std::vector<int>& rs) {
      const double rt = 1e-9 * (1.0 + Ai.row(row).norm());
      for (int r : rs) {
        if (std::abs(Ai.row(row).dot(K.rays[static_cast<size_t>(r)])) > rt) return false;
      }
      return true;
    };
    auto close = [&](std::vector<int> rs) {
      Face f{std::move(rs), {}};
      for (int i = 0; i < Ai.rows(); ++i) {
        if (tight_on(i, f.rays)) f.tight.push_back(i);
      }
      return f;
    };
    std::vector<int> all(K.rays.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::set<std::vector<int>> seen;
    std::vector<Face> queue{close(all)};
    seen.insert(queue.front().rays);
    while (!queue.empty() && !overflow) {
      Face f = std::move(queue.back());
      queue.pop_back();
      faces.push_back(f);
      if (static_cast<int>(faces.size()) > budget.max_faces) {
        overflow = true;
        break;
      }
      for (int i = 0; i < Ai.rows(); ++i) {
        if (std::find(f.tight.begin(), f.tight.end(), i) != f.tight.end()) continue;
        std::vector<int> sub;
        for (int r : f.rays) {
          if (std::abs(Ai.row(i).dot(K.rays[static_cast<size_t>(r)])) <= 1e-9 * (1.0 + Ai.row(i).norm())) sub.push_back(r);
        }
        if (sub.empty() && K.lines.empty()) continue;
        if (seen.insert(sub).second) queue.push_back(close(sub));
      }
    }
  }
  out.faces = static_cast<int>(faces.size());
  out.exact = !overflow;

  std::vector<Vec> candidates;
  if (out.exact) {
    double lower = -std::numeric_limits<double>::infinity();
    for (const Mat& Lf : forms) {
      const FaceMin fm = exact_min_on_faces(Lf, faces, K.rays, K.lines, Ai, E, n);
      lower = std::max(lower, fm.value);
      if (fm.argmin.size()) candidates.push_back(fm.argmin);
    }
    out.lower = lower;
  }
  for (const Vec& r : K.rays) candidates.push_back(r);
  for (const Vec& l : K.lines) {
    candidates.push_back(l);
    candidates.push_back(-l);
  }
  std::mt19937_64 rng(budget.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < budget.face_samples; ++s) {
    Vec w = Vec::Zero(n);
    for (const Vec& r : K.rays) w += unif(rng) * r;
    for (const Vec& l : K.lines) w += gauss(rng) * l;
    if (w.norm() > 1e-12) candidates.push_back(w);
  }
  for (Vec w : candidates) {
    w /= w.norm();
    const ExtReal v = critical_quadratic_value(p, lam, w);
    if (v.is_infinite()) {
      out.multiplier_rays_active = true;
      continue;
    }
    if (v.value() < out.upper) {
      out.upper = v.value();
      out.witness = w;
    }
  }
  if (out.exact && out.lower > out.upper) out.lower = out.upper;  // round-off between the two routes
  return out;
}

namespace {

Condition from_bounds(const CriticalQuadratic& a, const std::string& what) {
  Condition c;
  if (a.vacuous) {
    c.verdict = Verdict::kHolds;
    c.provenance = "exact";
    c.evidence = "critical cone is {0}; " + what + " holds vacuously";
    c.margin = std::numeric_limits<double>::infinity();
    return c;
  }
  c.margin = a.lower;
  if (a.exact && a.lower > a.tol) {
    c.verdict = Verdict::kHolds;
    c.provenance = "exact";
    c.evidence = "face analysis: min over unit critical directions >= " + fmt(a.lower);
  } else if (a.upper <= a.tol) {
    c.verdict = Verdict::kFails;
    c.provenance = "exact";
    c.evidence = "critical direction with value " + fmt(a.upper);
    c.witness = a.witness;
  } else {
    c.provenance = "undetermined";
    c.evidence = "bounds [" + fmt(a.lower) + ", " + fmt(a.upper) + "] straddle zero";
  }
  return c;
}

std::vector<double> radii(double gamma) { return {gamma, gamma / 10, gamma / 100}; }

}  // namespace

Condition condition_vi_check(const CompositeProblem& p, const GrowthBudget& budget) {
  return from_bounds(analyze_critical_quadratic(p, budget), "(vi)");
}

QgModulus qg_modulus(const CompositeProblem& p, const GrowthBudget& budget) {
  const CriticalQuadratic a = analyze_critical_quadratic(p, budget);
  QgModulus m;
  m.lower = a.exact ? ExtReal(a.lower) : ExtReal(-std::numeric_limits<double>::max());
  m.upper = std::isinf(a.upper) ? ExtReal::infinity() : ExtReal(a.upper);
  if (a.vacuous) m.lower = m.upper = ExtReal::infinity();
  m.meaningful = a.vacuous || (a.exact && a.lower > a.tol);
  return m;
}

GrowthReport thm43_battery(const CompositeProblem& p, const GrowthBudget& budget) {
  GrowthReport rep;
  const Evaluable f = make_evaluable(p, 0.0);
  const Vec& xb = p.x_bar();

  // Local-minimizer sampling, shared by (iii).
  auto local_min = [&]() {
    Condition c;
    c.provenance = "sampled";
    const double fb = f(xb).finite_value();
    for (double g : radii(budget.gamma)) {
      bool ok = true;
      for (const Vec& x : ball_samples(xb, g, budget.samples, budget.seed)) {
        const ExtReal fx = f(x);
        if (fx.is_finite() && fx.value() < fb - 1e-12 * (1 + std::abs(fb))) {
          ok = false;
          c.witness = x;
          break;
        }
      }
      if (ok) {
        c.verdict = Verdict::kHolds;
        c.evidence = "f(x) >= f(x̄) on samples of radius " + fmt(g);
        c.witness.reset();
        return c;
      }
    }
    c.verdict = Verdict::kFails;
    c.evidence = "sample with f(x) < f(x̄) at every radius";
    return c;
  };

  if (!p.is_polyhedral()) {
    rep.caveats.push_back(
        "g is a black box: the equivalence of (i)-(vi) requires ψ subdifferentially continuous, prox-regular "
        "and twice epi-differentiable at x̄, which cannot be checked here");
    for (auto& c : rep.cond) c.provenance = "undetermined";
    const Condition lm = local_min();
    if (lm.verdict == Verdict::kFails) {
      rep.cond[0] = lm;
      rep.cond[2] = lm;
    }
    rep.modulus.lower = ExtReal(-std::numeric_limits<double>::max());
    rep.modulus.upper = ExtReal::infinity();
    rep.modulus.meaningful = false;
  } else {
    rep.lagrangian_form_used = true;
    rep.caveats.push_back("MSQC is assumed; κ-dependent bounds are heuristic when κ is only sampled");
    const CriticalQuadratic a = analyze_critical_quadratic(p, budget);
    rep.analysis = a;
    rep.modulus.lower = a.vacuous ? ExtReal::infinity() : (a.exact ? ExtReal(a.lower) : ExtReal(-std::numeric_limits<double>::max()));
    rep.modulus.upper = std::isinf(a.upper) ? ExtReal::infinity() : ExtReal(a.upper);
    rep.modulus.meaningful = a.vacuous || (a.exact && a.lower > a.tol);
    if (a.multiplier_rays_active) {
      rep.caveats.push_back("a ray of the multiplier set makes the max formula unbounded on part of K");
    }

    // (vi)
    rep.cond[5] = from_bounds(a, "(vi)");
    const Verdict vi = rep.cond[5].verdict;

    // (v): c = lower bound on the critical quadratic.
    rep.cond[4] = from_bounds(a, "(v)");
    if (rep.cond[4].verdict == Verdict::kHolds && !a.vacuous) rep.cond[4].evidence += "; c = " + fmt(a.lower);

    // (iv): pairing ⟨∇²φw,w⟩ + ⟨z,w⟩ over the graphical derivative at candidate directions.
    {
      Condition c = from_bounds(a, "(iv)");
      if (!a.vacuous && a.witness.size()) {
        const GraphDerivValue gd = sum_rule_graphical(p, a.witness);
        if (!gd.empty) {
          double worst = std::numeric_limits<double>::infinity();
          for (const Vec& z : gd.generators.points) worst = std::min(worst, z.dot(a.witness));
          c.evidence += "; pairing at witness = " + fmt(worst);
          if (worst <= a.tol) {
            c.verdict = Verdict::kFails;
            c.provenance = "exact";
            c.witness = a.witness;
          }
        }
      }
      rep.cond[3] = c;
    }

    // (i): sampled QGC with κ from the modulus (or the user).
    const double kappa_qg = budget.kappa ? *budget.kappa
                            : a.vacuous ? 1.0
                            : vi == Verdict::kHolds ? a.lower / 2
                                                    : 1e-9;
    {
      Condition c;
      c.provenance = "sampled";
      SampleCheck last;
      bool any_hold = false;
      for (double g : radii(budget.gamma)) {
        last = qgc_sample_check(f, xb, kappa_qg, g, budget.samples, budget.seed);
        if (last.holds) {
          any_hold = true;
          c.evidence = "QGC with κ = " + fmt(kappa_qg) + " on samples of radius " + fmt(g);
          break;
        }
      }
      if (!any_hold) {
        c.verdict = Verdict::kFails;
        c.evidence = "QGC with κ = " + fmt(kappa_qg) + " violated at every radius; worst ratio " + fmt(last.worst_ratio);
        c.witness = last.witness;
      } else if (vi == Verdict::kHolds) {
        c.verdict = Verdict::kHolds;
      } else {
        c.verdict = Verdict::kUndetermined;
        c.provenance = "undetermined";
      }
      rep.cond[0] = c;
    }

    // SMS: a sampled failure is decisive; holding is certified only through (v).
    Condition sms;
    {
      const double kappa_sms = 2.0 / kappa_qg * (1 + 1e-6);
      bool any_hold = false;
      SampleCheck last;
      for (double g : radii(budget.gamma)) {
        last = sms_sample_check(p, kappa_sms, g, budget.samples, budget.seed);
        if (last.holds) {
          any_hold = true;
          break;
        }
      }
      if (!any_hold) {
        sms.verdict = Verdict::kFails;
        sms.provenance = "sampled";
        sms.evidence = "SMS with κ = " + fmt(kappa_sms) + " violated; worst ratio " + fmt(last.worst_ratio);
        sms.witness = last.witness;
      } else if (rep.cond[4].verdict == Verdict::kHolds) {
        sms.verdict = Verdict::kHolds;
        sms.provenance = "exact";
        sms.evidence = "SMS certified via (v); samples agree with κ = " + fmt(kappa_sms);
      } else {
        sms.provenance = "undetermined";
        sms.evidence = "SMS not falsified on samples";
      }
    }

    // (ii): SMS and nonnegativity of the critical quadratic.
    {
      Condition nn;
      if (a.vacuous || (a.exact && a.lower >= -a.tol)) {
        nn.verdict = Verdict::kHolds;
      } else if (a.upper < -a.tol) {
        nn.verdict = Verdict::kFails;
        nn.witness = a.witness;
      }
      Condition c;
      c.verdict = verdict_and(sms.verdict, nn.verdict);
      c.provenance = c.verdict == Verdict::kUndetermined ? "undetermined" : sms.verdict == Verdict::kFails ? sms.provenance : "exact";
      c.evidence = sms.evidence + "; critical quadratic lower bound " + fmt(a.lower);
      c.witness = sms.witness ? sms.witness : nn.witness;
      rep.cond[1] = c;
    }

    // (iii): SMS and local minimality.
    {
      const Condition lm = local_min();
      Condition c;
      c.verdict = verdict_and(sms.verdict, lm.verdict);
      c.provenance = c.verdict == Verdict::kUndetermined ? "undetermined" : "sampled";
      c.evidence = sms.evidence + "; " + lm.evidence;
      c.witness = lm.witness ? lm.witness : sms.witness;
      rep.cond[2] = c;
    }
  }

  std::optional<Verdict> seen;
  for (const Condition& c : rep.cond) {
    if (c.verdict == Verdict::kUndetermined) continue;
    if (seen && *seen != c.verdict) rep.consistency = false;
    seen = c.verdict;
  }
  if (!rep.consistency) rep.caveats.push_back("determined verdicts disagree: bug or hypothesis violation");
  return rep;
}

}  // namespace varcalc
