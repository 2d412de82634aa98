#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/ext_real.hpp"
#include "varcalc/problem.hpp"

namespace varcalc {

using Evaluable = std::function<ExtReal(const Vec&)>;
using GradientProbe = std::function<Vec(const Vec&)>;

// f of a composite problem; `tol` is the indicator membership tolerance. Estimators
// use tol = 0 so that O(t) infeasibility is not hidden at small t.
Evaluable make_evaluable(const CompositeProblem& p, double tol = 0.0);

struct GridSchedule {
  double t0 = 1e-1;
  double ratio = 0.5;
  int levels = 20;
  double c = 1.0;         // direction-ball radius at level j is c·t_j
  int directions = 64;    // quasi-random ball samples per level, plus the centre
  int refine_evals = 256; // pattern-search budget per level inside the ball; 0 disables
  std::uint64_t seed = 7;
  double divergence_threshold = 1e6;

  void validate() const;
  double t(int level) const;
  double radius(int level) const { return c * t(level); }
};

struct Witness {
  int level;
  double t;
  Vec direction;
  double quotient;  // +inf for points outside dom f
};

struct LiminfEstimate {
  ExtReal value;
  bool diverging = false;
  double threshold = 0;
  std::vector<Witness> witnesses;
  std::vector<double> level_minima;
  int evaluation_errors = 0;
};

LiminfEstimate est_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& w,
                                 const GridSchedule& sched = {});
LiminfEstimate est_second_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& v, const Vec& w,
                                        const GridSchedule& sched = {});
LiminfEstimate est_parabolic_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& w, double df_val,
                                           const Vec& z, const GridSchedule& sched = {});

// Rows: level, t, direction coordinates, quotient.
void write_witness_csv(const LiminfEstimate& e, std::ostream& os);

enum class ProbeStrategy { kPaperSequences, kPairGrid };
std::string to_string(ProbeStrategy s);

struct Counterexample {
  Vec x1, x2, v1, v2;
  double r = 0;    // r_max the pair violates
  double lhs = 0;  // ⟨v2 − v1, x2 − x1⟩
  double rhs = 0;  // −r‖x2 − x1‖²
  std::string source;
};

struct FalsifyResult {
  std::optional<Counterexample> counterexample;
  double eps = 0;
  long probes = 0;
  long rejected = 0;  // probes outside the ε-balls or at non-differentiable points
};

struct FalsifyBudget {
  long max_k = 2'000'000;   // paper sequences: largest index scanned
  long pairs = 200'000;     // pair grid
  std::uint64_t seed = 7;
};

FalsifyResult prox_regularity_falsify(const GradientProbe& grad, const Vec& x_bar, const Vec& v_bar,
                                      double r_max, double eps, ProbeStrategy strategy,
                                      const FalsifyBudget& budget = {});
std::vector<FalsifyResult> prox_regularity_sweep(const GradientProbe& grad, const Vec& x_bar, const Vec& v_bar,
                                                 double r_max, const std::vector<double>& eps_values,
                                                 ProbeStrategy strategy, const FalsifyBudget& budget = {});
// Recomputes gradients and the inequality in extended precision.
bool verify_counterexample(const GradientProbe& grad, const Counterexample& ce);

struct SampleCheck {
  bool holds = true;
  double worst_ratio = 0;
  Vec witness;
  int samples = 0;
  int skipped = 0;
  int errors = 0;
};

// Samples the γ-ball. worst_ratio = min 2(f(x) − f(x̄))/‖x − x̄‖².
SampleCheck qgc_sample_check(const Evaluable& f, const Vec& x_bar, double kappa, double gamma, int n_samples,
                             std::uint64_t seed = 7);
// worst_ratio = max ‖x − x̄‖ / dist(0, ∂f(x)) over samples with ∂f(x) ≠ ∅.
SampleCheck sms_sample_check(const CompositeProblem& p, double kappa, double gamma, int n_samples,
                             std::uint64_t seed = 7);

// Sample points used by the checks above: quasi-random ball points plus points on the
// sphere of radius γ·2^-j along coordinate axes.
std::vector<Vec> ball_samples(const Vec& centre, double gamma, int n_samples, std::uint64_t seed);

}  // namespace varcalc
