#pragma once

#include <optional>
#include <string>

#include "varcalc/common.hpp"
#include "varcalc/polyhedron.hpp"

namespace varcalc {

enum class LpSense { kMin, kMax };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
std::string to_string(LpStatus s);

// Optimize ⟨c, x⟩ over free x subject to Ax ≤ b, Ex = d.
struct LpProblem {
  Vec c;
  Mat A;
  Vec b;
  Mat E;
  Vec d;
  LpSense sense = LpSense::kMin;

  int num_vars() const { return static_cast<int>(c.size()); }
  // Zero objective over a polyhedron.
  static LpProblem over(const Polyhedron& P, const Vec& c, LpSense sense = LpSense::kMin);
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vec x;              // optimal basic solution
  double value = 0;   // objective at x (sense applied)
  Vec ray;            // unbounded: feasible direction improving the objective
  Vec farkas_ineq;    // infeasible: u ≥ 0 and w with Aᵀu + Eᵀw = 0, ⟨b,u⟩ + ⟨d,w⟩ < 0
  Vec farkas_eq;
  Vec dual_ineq;      // optimal: multipliers from the final basis
  Vec dual_eq;
  double dual_value = 0;
  int iterations = 0;
};

inline constexpr int kLpMaxVars = 64;
inline constexpr int kLpMaxRows = 256;

// Two-phase primal simplex with Bland's rule.
// Throws CapacityError beyond kLpMaxVars / kLpMaxRows and NumericalError on stalls
// or when the final basis fails the duality-gap check.
LpResult lp_solve(const LpProblem& p);

// Phase-1 point of P, or nothing when P is empty.
std::optional<Vec> feasible_point(const Polyhedron& P);

}  // namespace varcalc
