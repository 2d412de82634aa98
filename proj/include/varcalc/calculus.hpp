#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/ext_real.hpp"
#include "varcalc/geometry.hpp"
#include "varcalc/problem.hpp"

namespace varcalc {

// Everything below is taken at the problem's base point with ψ-level subgradient
// p.v_bar(); the f-level subgradient is then p.v_bar() + ∇φ(x̄).

struct MsqcResult {
  bool holds_on_samples = true;
  double kappa_est = 0;   // max sampled d(x, dom ψ) / d(F(x), dom g)
  int samples = 0;        // samples with F(x) ∉ dom g
  int stalls = 0;         // Gauss–Newton projections that failed to converge
  Vec worst;              // sample realizing kappa_est
};
// d(x, dom ψ) is a local Gauss–Newton estimate. With `kappa`, holds requires κ_est ≤ κ.
MsqcResult msqc_check(const CompositeProblem& p, double radius, int n_samples,
                      std::optional<double> kappa = std::nullopt, std::uint64_t seed = 7);
// κ for τ bounds from a sampled estimate, which can only undershoot the true constant:
// max(1, 1.1·kappa_est).
double msqc_kappa(const MsqcResult& r);
// Local estimate of the projection of x onto {x : F(x) ∈ dom g}; nullopt on stall.
std::optional<Vec> project_onto_domain(const CompositeProblem& p, const Vec& x, int max_iter = 12);

Polyhedron psi_subdifferential(const CompositeProblem& p);

struct MultiplierSet {
  Polyhedron set;  // ∂g(F(x̄)) rows plus ∇F(x̄)ᵀy = v̄
  Vec member;
};
// Throws InconsistentInput when empty.
MultiplierSet multiplier_set(const CompositeProblem& p);
Generators multiplier_generators(const CompositeProblem& p);

double tau_bound(const CompositeProblem& p, double kappa, double ell);

struct CriticalCone {
  PolyCone cone;
  std::vector<Vec> rays;
  std::vector<Vec> lines;
  bool is_zero() const { return rays.empty() && lines.empty(); }
};
CriticalCone critical_cone(const CompositeProblem& p);
// |dψ(x̄)(w) − ⟨v̄, w⟩| within tolerance.
bool is_critical(const CompositeProblem& p, const Vec& w);

struct MaxFormula {
  ExtReal value;
  std::optional<Polyhedron> argmax;  // multipliers attaining the max
  std::optional<Vec> argmax_point;
  bool unrestricted_unbounded = false;
  double tau_used = 0;               // radius of the ball used after an unbounded solve
};
// max{⟨y, ∇²F(x̄)(w,w)⟩ : y ∈ Λ, ⟨y, ∇F(x̄)w⟩ = dg(F(x̄))(∇F(x̄)w)}; +inf off the critical cone.
MaxFormula d2_psi_max_formula(const CompositeProblem& p, const Vec& w, std::optional<double> tau = std::nullopt);

struct DualPair {
  ExtReal primal;
  ExtReal dual;
  Vec z_min;  // primal minimizer
};
DualPair d2_psi_dual_pair(const CompositeProblem& p, const Vec& w);

struct TauAttainment {
  bool attained = false;
  double tau = 0;
  Vec point;
  double norm = 0;
  std::string method;  // "box" (inscribed ℓ∞ box LP) or "euclidean" (projection fallback)
};
TauAttainment tau_attainment(const CompositeProblem& p, const Vec& w, double tau);

ExtReal chain_rule_parabolic(const CompositeProblem& p, const Vec& w, const Vec& z);
ExtReal sum_rule_parabolic(const CompositeProblem& p, const Vec& w, const Vec& z);
ExtReal sum_rule_second_subderivative(const CompositeProblem& p, const Vec& w);

struct ParabolicRegularity {
  ExtReal lhs;
  ExtReal rhs;
  Vec z_bar;
};
ParabolicRegularity parabolic_regularity_check(const CompositeProblem& p, const Vec& w);

struct GraphDerivValue {
  bool empty = true;
  Generators generators;
  std::optional<Polyhedron> set;
};
// D∂ψ(x̄|v̄)(w) as ∂(½d²ψ(x̄|v̄))(w).
GraphDerivValue psi_graphical_derivative(const CompositeProblem& p, const Vec& w);
// ∇²φ(x̄)w + D∂ψ(x̄|v̄)(w).
GraphDerivValue sum_rule_graphical(const CompositeProblem& p, const Vec& w);

// Σ_k y_k ∇²F_k(x̄).
Mat weighted_F_hessian(const CompositeProblem& p, const Vec& y);

}  // namespace varcalc
