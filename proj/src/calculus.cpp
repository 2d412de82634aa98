#include "varcalc/calculus.hpp"

#include <cmath>

#include "varcalc/lp.hpp"
#include "varcalc/sampling.hpp"

namespace varcalc {

namespace {

double crit_tol(const CompositeProblem& p, const Vec& w) {
  return 1e-8 * (1.0 + w.norm()) * (1.0 + p.v_bar().norm() + p.jacobian().norm());
}

Vec q_of(const CompositeProblem& p, const Vec& w) { return second_order_term(p.F_hessians(), w); }

}  // namespace

double msqc_kappa(const MsqcResult& r) { return std::max(1.0, 1.1 * r.kappa_est); }

std::optional<Vec> project_onto_domain(const CompositeProblem& p, const Vec& x, int max_iter) {
  const Polyhedron dom = p.polyhedral().domain();
  if (dom.rows() == 0) return x;
  Vec xk = x;
  for (int it = 0; it <= max_iter; ++it) {
    const Vec Fk = p.F().value(xk);
    if (dom.violation(Fk) <= 1e-13) return xk;
    if (it == max_iter) break;
    const Mat Jk = p.F().jacobian(xk);
    // {x' : A (F_k + J_k (x' − x_k)) ≤ b}
    Polyhedron lin(dom.A() * Jk, dom.b() - dom.A() * (Fk - Jk * xk), dom.equality_flags());
    try {
      xk = project_onto_polyhedron(lin, x).point;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

MsqcResult msqc_check(const CompositeProblem& p, double radius, int n_samples, std::optional<double> kappa,
                      std::uint64_t seed) {
  const PolyhedralFn& g = p.polyhedral();
  const Polyhedron dom = g.domain();
  MsqcResult out;
  if (dom.rows() == 0) return out;
  const int n = p.n();
  std::vector<Vec> pts;
  // Structured candidates: push F outward along the active normals of dom g.
  const Mat Jpinv = p.jacobian().completeOrthogonalDecomposition().pseudoInverse();
  for (int i : dom.active_rows(p.F_bar())) {
    const Vec dir = Jpinv * dom.A().row(i).transpose();
    if (dir.norm() < 1e-12) continue;
    for (double s : {radius, radius / 10, radius / 100}) pts.push_back(p.x_bar() + s * dir / dir.norm());
  }
  QuasiRandom qr(n + 1, seed);
  for (std::uint64_t k = 0; static_cast<int>(pts.size()) < n_samples; ++k) {
    const double r = radius * std::pow(0.1, static_cast<double>(k % 3));
    pts.push_back(p.x_bar() + r * qr.ball(k));
  }
  for (const Vec& x : pts) {
    const Vec Fx = p.F().value(x);
    const double dF = project_onto_polyhedron(dom, Fx).distance;
    if (dF <= 1e-14) continue;
    ++out.samples;
    const auto px = project_onto_domain(p, x);
    if (!px) {
      ++out.stalls;
      continue;
    }
    const double ratio = (x - *px).norm() / dF;
    if (ratio > out.kappa_est || out.worst.size() == 0) {
      out.kappa_est = std::max(out.kappa_est, ratio);
      out.worst = x;
    }
  }
  out.holds_on_samples = out.stalls == 0 && (!kappa || out.kappa_est <= *kappa * (1 + 1e-9) + 1e-12);
  return out;
}

Polyhedron psi_subdifferential(const CompositeProblem& p) {
  const PolyhedralFn& g = p.polyhedral();
  return hull(map_generators(g.subgradients(p.F_bar()), p.jacobian().transpose()));
}

MultiplierSet multiplier_set(const CompositeProblem& p) {
  const PolyhedralFn& g = p.polyhedral();
  const Polyhedron C = hull(g.subgradients(p.F_bar()));
  const Mat Jt = p.jacobian().transpose();
  Polyhedron lam = C.intersect(Polyhedron(Jt, p.v_bar(), std::vector<bool>(static_cast<size_t>(p.n()), true)));
  const auto y = feasible_point(lam);
  if (!y) throw InconsistentInput("multiplier set is empty: v̄ is not a subgradient of ψ at x̄");
  return {std::move(lam), *y};
}

Generators multiplier_generators(const CompositeProblem& p) { return vertex_enumerate(multiplier_set(p).set); }

double tau_bound(const CompositeProblem& p, double kappa, double ell) {
  const double jn = p.jacobian().size() ? Eigen::JacobiSVD<Mat>(p.jacobian()).singularValues()(0) : 0.0;
  return kappa * ell * jn + kappa * p.v_bar().norm() + ell;
}

CriticalCone critical_cone(const CompositeProblem& p) {
  const PolyhedralFn& g = p.polyhedral();
  const MultiplierSet lam = multiplier_set(p);
  const Polyhedron C = hull(g.subgradients(p.F_bar()));
  // K_ψ = {w : ∇F(x̄)w ∈ N_C(y0)} for any y0 ∈ Λ.
  Generators normal;
  normal.dim = p.m();
  normal.points.push_back(Vec::Zero(p.m()));
  for (int i : C.active_rows(lam.member, 1e-7)) {
    (C.is_equality(i) ? normal.lines : normal.rays).push_back(C.A().row(i).transpose());
  }
  const Polyhedron N = hull(normal);
  const Mat rows = N.A() * p.jacobian();
  Polyhedron K(rows, Vec::Zero(N.rows()), N.equality_flags());
  Mat Ai, E;
  Vec bi, d;
  K.split(Ai, bi, E, d);
  ConeGenerators cg = cone_generators(Ai, E, p.n());
  return {PolyCone(std::move(K)), std::move(cg.rays), std::move(cg.lines)};
}

bool is_critical(const CompositeProblem& p, const Vec& w) {
  require_dim(w.size(), p.n(), "is_critical");
  const ExtReal d = g_subderivative(p.polyhedral(), p.F_bar(), p.jacobian() * w);
  return d.is_finite() && std::abs(d.value() - p.v_bar().dot(w)) <= crit_tol(p, w);
}

MaxFormula d2_psi_max_formula(const CompositeProblem& p, const Vec& w, std::optional<double> tau) {
  require_dim(w.size(), p.n(), "d2_psi_max_formula");
  const PolyhedralFn& g = p.polyhedral();
  const MultiplierSet lam = multiplier_set(p);
  MaxFormula out;
  const Vec u = p.jacobian() * w;
  const ExtReal du = g_subderivative(g, p.F_bar(), u);
  if (du.is_infinite() || std::abs(du.value() - p.v_bar().dot(w)) > crit_tol(p, w)) {
    out.value = ExtReal::infinity();
    return out;
  }
  const Vec q = q_of(p, w);
  Polyhedron feas = lam.set.with_row(u, du.value(), true);
  LpResult r = lp_solve(LpProblem::over(feas, q, LpSense::kMax));
  if (r.status == LpStatus::kInfeasible) {
    out.value = ExtReal::infinity();
    return out;
  }
  if (r.status == LpStatus::kUnbounded) {
    out.unrestricted_unbounded = true;
    const double t = tau ? *tau : tau_bound(p, 1.0, g.lipschitz());
    out.tau_used = t;
    const double box = t / std::sqrt(static_cast<double>(p.m()));
    Polyhedron boxed = feas;
    for (int k = 0; k < p.m(); ++k) {
      boxed = boxed.with_row(Vec::Unit(p.m(), k), box).with_row(-Vec::Unit(p.m(), k), box);
    }
    r = lp_solve(LpProblem::over(boxed, q, LpSense::kMax));
    if (r.status != LpStatus::kOptimal) throw InconsistentInput("d2_psi_max_formula: Λ∩τB is empty");
    feas = boxed;
  }
  out.value = ExtReal(r.value);
  out.argmax_point = r.x;
  out.argmax = feas.with_row(q, r.value, true);
  return out;
}

DualPair d2_psi_dual_pair(const CompositeProblem& p, const Vec& w) {
  require_dim(w.size(), p.n(), "d2_psi_dual_pair");
  const PolyhedralFn& g = p.polyhedral();
  const Vec u = p.jacobian() * w;
  const PolyhedralFn h = g.directional(p.F_bar());
  if (h.value(u).is_infinite()) throw DomainError("d2_psi_dual_pair: direction is not tangent to dom ψ");
  const PolyhedralFn h2 = h.directional(u);
  const Vec q = q_of(p, w);

  LpBuilder lp;
  std::vector<int> z(static_cast<size_t>(p.n()));
  for (auto& v : z) v = lp.add_var();
  std::vector<LinExpr> arg(static_cast<size_t>(p.m()));
  for (int k = 0; k < p.m(); ++k) {
    arg[static_cast<size_t>(k)].constant = q(k);
    for (int i = 0; i < p.n(); ++i) arg[static_cast<size_t>(k)].add(z[static_cast<size_t>(i)], p.jacobian()(k, i));
  }
  LinExpr obj = encode_epigraph(h2, arg, lp);
  for (int i = 0; i < p.n(); ++i) obj.add(z[static_cast<size_t>(i)], -p.v_bar()(i));
  const LpResult r = lp_solve(lp.build(obj, LpSense::kMin));
  DualPair out;
  if (r.status == LpStatus::kUnbounded) {
    throw InconsistentInput("d2_psi_dual_pair: primal problem unbounded below (hypotheses violated)");
  }
  if (r.status == LpStatus::kInfeasible) {
    out.primal = ExtReal::infinity();
  } else {
    out.primal = ExtReal(r.value + obj.constant);
    out.z_min = Vec(p.n());
    for (int i = 0; i < p.n(); ++i) out.z_min(i) = r.x(z[static_cast<size_t>(i)]);
  }
  out.dual = d2_psi_max_formula(p, w).value;
  return out;
}

TauAttainment tau_attainment(const CompositeProblem& p, const Vec& w, double tau) {
  const MaxFormula mf = d2_psi_max_formula(p, w, tau);
  TauAttainment out;
  out.tau = tau;
  if (!mf.argmax) throw DomainError("tau_attainment: direction is not critical");
  const int m = p.m();
  const double box = tau / std::sqrt(static_cast<double>(std::max(m, 1)));
  Polyhedron boxed = *mf.argmax;
  for (int k = 0; k < m; ++k) {
    boxed = boxed.with_row(Vec::Unit(m, k), box).with_row(-Vec::Unit(m, k), box);
  }
  if (auto y = feasible_point(boxed)) {
    out.point = *y;
    out.norm = y->norm();
    out.method = "box";
    out.attained = out.norm <= tau * (1 + 1e-9) + 1e-12;
    if (out.attained) return out;
  }
  const Projection pr = project_onto_polyhedron(*mf.argmax, Vec::Zero(m));
  out.point = pr.point;
  out.norm = pr.distance;
  out.method = "euclidean";
  out.attained = out.norm <= tau * (1 + 1e-9) + 1e-12;
  return out;
}

ExtReal chain_rule_parabolic(const CompositeProblem& p, const Vec& w, const Vec& z) {
  require_dim(w.size(), p.n(), "chain_rule_parabolic: w");
  require_dim(z.size(), p.n(), "chain_rule_parabolic: z");
  const PolyhedralFn& g = p.polyhedral();
  const Vec u = p.jacobian() * w;
  if (g_subderivative(g, p.F_bar(), u).is_infinite()) {
    throw DomainError("chain_rule_parabolic: ∇F(x̄)w is not tangent to dom g");
  }
  return g_parabolic_subderivative(g, p.F_bar(), u, p.jacobian() * z + q_of(p, w));
}

ExtReal sum_rule_parabolic(const CompositeProblem& p, const Vec& w, const Vec& z) {
  return ExtReal(w.dot(p.hess_phi() * w) + p.grad_phi().dot(z)) + chain_rule_parabolic(p, w, z);
}

ExtReal sum_rule_second_subderivative(const CompositeProblem& p, const Vec& w) {
  require_dim(w.size(), p.n(), "sum_rule_second_subderivative");
  return ExtReal(w.dot(p.hess_phi() * w)) + d2_psi_max_formula(p, w).value;
}

ParabolicRegularity parabolic_regularity_check(const CompositeProblem& p, const Vec& w) {
  ParabolicRegularity out;
  out.lhs = d2_psi_max_formula(p, w).value;
  const DualPair dp = d2_psi_dual_pair(p, w);
  if (dp.primal.is_infinite()) {
    out.rhs = ExtReal::infinity();
    return out;
  }
  out.z_bar = dp.z_min;
  out.rhs = chain_rule_parabolic(p, w, dp.z_min) - p.v_bar().dot(dp.z_min);
  return out;
}

Mat weighted_F_hessian(const CompositeProblem& p, const Vec& y) {
  require_dim(y.size(), p.m(), "weighted_F_hessian");
  Mat H = Mat::Zero(p.n(), p.n());
  for (int k = 0; k < p.m(); ++k) H += y(k) * p.F_hessians()[static_cast<size_t>(k)];
  return H;
}

GraphDerivValue psi_graphical_derivative(const CompositeProblem& p, const Vec& w) {
  require_dim(w.size(), p.n(), "psi_graphical_derivative");
  GraphDerivValue out;
  out.generators.dim = p.n();
  const CriticalCone K = critical_cone(p);
  if (!K.cone.contains(w, 1e-8 * (1 + w.norm()))) return out;
  const Generators lam = multiplier_generators(p);
  const Vec q = q_of(p, w);
  const double tol = 1e-9 * (1.0 + q.norm()) * (1.0 + w.squaredNorm());
  double top = -std::numeric_limits<double>::infinity();
  for (const Vec& y : lam.points) top = std::max(top, y.dot(q));
  for (const Vec& y : lam.points) {
    if (y.dot(q) >= top - tol) out.generators.points.push_back(weighted_F_hessian(p, y) * w);
  }
  auto add_ray = [&](const Vec& r) {
    const double v = r.dot(q);
    if (v > tol) throw InconsistentInput("graphical derivative: multiplier ray makes d²ψ unbounded");
    if (v >= -tol) {
      const Vec z = weighted_F_hessian(p, r) * w;
      if (z.norm() > 1e-14) out.generators.rays.push_back(z);
    }
  };
  for (const Vec& r : lam.rays) add_ray(r);
  for (const Vec& l : lam.lines) {
    add_ray(l);
    add_ray(-l);
  }
  // Normal cone of K at w.
  const Polyhedron& KP = K.cone.polyhedron();
  for (int i : KP.active_rows(w, 1e-8 * (1 + w.norm()))) {
    (KP.is_equality(i) ? out.generators.lines : out.generators.rays).push_back(KP.A().row(i).transpose());
  }
  out.empty = false;
  out.set = hull(out.generators);
  return out;
}

GraphDerivValue sum_rule_graphical(const CompositeProblem& p, const Vec& w) {
  GraphDerivValue out = psi_graphical_derivative(p, w);
  if (out.empty) return out;
  const Vec shift = p.hess_phi() * w;
  for (Vec& z : out.generators.points) z += shift;
  out.set = hull(out.generators);
  return out;
}

}  // namespace varcalc
