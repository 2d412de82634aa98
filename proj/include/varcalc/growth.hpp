#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "varcalc/calculus.hpp"
#include "varcalc/common.hpp"
#include "varcalc/ext_real.hpp"
#include "varcalc/problem.hpp"

namespace varcalc {

enum class Verdict { kHolds, kFails, kUndetermined };
std::string to_string(Verdict v);
// Three-valued conjunction.
Verdict verdict_and(Verdict a, Verdict b);

struct Condition {
  Verdict verdict = Verdict::kUndetermined;
  std::string provenance;  // exact | sampled | undetermined
  std::string evidence;
  std::optional<Vec> witness;
  double margin = 0;
};

struct GrowthBudget {
  double gamma = 0.05;          // sampling radius for (i)-(iii); also tried at γ/10 and γ/100
  int samples = 512;
  int face_samples = 256;
  int max_faces = 256;
  int max_vertices = 32;
  std::uint64_t seed = 7;
  std::optional<double> kappa;  // user κ for (i)
};

// L(x,y) = φ(x) + ⟨F(x),y⟩ − g*(y).
class Lagrangian {
 public:
  explicit Lagrangian(const CompositeProblem& p) : p_(p) {}
  ExtReal value(const Vec& x, const Vec& y) const;
  // ∇²ₓₓL(x̄,y) = ∇²φ(x̄) + Σ y_k ∇²F_k(x̄).
  Mat hessian_xx(const Vec& y) const;

 private:
  const CompositeProblem& p_;
};

// Q(w) = ⟨∇²φ(x̄)w,w⟩ + d²ψ(x̄|v̄)(w) minimized over the unit sphere of the critical cone.
struct CriticalQuadratic {
  bool vacuous = false;   // K = {0}
  bool exact = false;     // face enumeration completed within budget
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  Vec witness;            // unit w realizing `upper`
  int faces = 0;
  int multiplier_vertices = 0;
  bool multiplier_rays_active = false;  // a ray of Λ raises Q to +inf somewhere on K
  double tol = 0;
};
CriticalQuadratic analyze_critical_quadratic(const CompositeProblem& p, const GrowthBudget& budget = {});
// max_{y ∈ Λ} ⟨∇²ₓₓL(x̄,y)w,w⟩ for w ∈ K; +inf when a multiplier ray increases it.
ExtReal critical_quadratic_value(const CompositeProblem& p, const Generators& lambda, const Vec& w);

Condition condition_vi_check(const CompositeProblem& p, const GrowthBudget& budget = {});

struct QgModulus {
  ExtReal lower;
  ExtReal upper;
  bool meaningful = true;  // false when (vi) is not established
};
QgModulus qg_modulus(const CompositeProblem& p, const GrowthBudget& budget = {});

struct GrowthReport {
  Condition cond[6];  // (i) .. (vi)
  QgModulus modulus;
  bool lagrangian_form_used = false;
  bool consistency = true;
  CriticalQuadratic analysis;
  std::vector<std::string> caveats;
};
GrowthReport thm43_battery(const CompositeProblem& p, const GrowthBudget& budget = {});

}  // namespace varcalc
