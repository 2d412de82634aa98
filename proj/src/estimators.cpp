#include "varcalc/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include "varcalc/geometry.hpp"
#include "varcalc/kernels.hpp"
#include "varcalc/sampling.hpp"

namespace varcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Quotient = std::function<double(double t, const Vec& dir)>;


// Local pattern search for the smallest quotient inside the ball of radius `radius`
// around `centre`, started from `start`.
void refine(const Quotient& q, double t, const Vec& centre, double radius, Vec start, double f_start,
            int budget, std::uint64_t seed, int level, std::vector<Witness>& out) {
  const int n = static_cast<int>(centre.size());
  if (budget <= 0 || !std::isfinite(f_start) || radius <= 0) return;
  QuasiRandom qr(n + 1, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Vec> dirs;
  double step = radius / 4;
  const double min_step = radius * 1e-9;
  int used = 0;
  std::uint64_t rot = static_cast<std::uint64_t>(level) * 1000003ULL;
  Vec x = std::move(start);
  double fx = f_start;
  while (used < budget && step > min_step) {
    dirs.clear();
    for (int i = 0; i < n; ++i) {
      dirs.push_back(Vec::Unit(n, i));
      dirs.push_back(-Vec::Unit(n, i));
    }
    for (int i = 0; i < 2 * n; ++i) dirs.push_back(qr.sphere(rot++));
    std::vector<Vec> cand;
    for (const Vec& d : dirs) {
      Vec y = x + step * d;
      if ((y - centre).norm() <= radius) cand.push_back(std::move(y));
    }
    const int cnt = static_cast<int>(cand.size());
    const auto batch = kernels::evaluate(cnt, [&](int i) { return q(t, cand[static_cast<size_t>(i)]); });
    used += cnt;
    const auto best = kernels::argmin(batch.values);
    if (best.index >= 0 && best.value < fx) {
      x = cand[static_cast<size_t>(best.index)];
      fx = best.value;
      out.push_back({level, t, x, fx});
      step = std::min(step * 2, radius / 2);
    } else {
      step /= 2;
    }
  }
}

LiminfEstimate run_grid(const GridSchedule& s, const Vec& centre, const Quotient& q) {
  s.validate();
  const int n = static_cast<int>(centre.size());
  QuasiRandom qr(n + 1, s.seed);
  LiminfEstimate est;
  est.threshold = s.divergence_threshold;
  // Offset of the previous level's best point, in units of that level's radius.
  std::optional<Vec> carried;
  for (int j = 0; j < s.levels; ++j) {
    const double t = s.t(j);
    const double rad = s.radius(j);
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<size_t>(s.directions) + 2);
    dirs.push_back(centre);
    if (carried) dirs.push_back(centre + rad * *carried);
    for (int k = 0; k < s.directions; ++k) {
      dirs.push_back(centre + rad * qr.ball(static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(s.directions) +
                                            static_cast<std::uint64_t>(k)));
    }
    const int cnt = static_cast<int>(dirs.size());
    const auto batch = kernels::evaluate(cnt, [&](int i) { return q(t, dirs[static_cast<size_t>(i)]); });
    est.evaluation_errors += batch.errors;
    for (int i = 0; i < cnt; ++i) {
      const double v = batch.values[static_cast<size_t>(i)];
      if (!std::isnan(v)) est.witnesses.push_back({j, t, dirs[static_cast<size_t>(i)], v});
    }
    const auto best = kernels::argmin(batch.values);
    double level_min = best.index >= 0 ? best.value : kInf;
    if (best.index >= 0 && std::isfinite(best.value)) {
      const size_t before = est.witnesses.size();
      refine(q, t, centre, rad, dirs[static_cast<size_t>(best.index)], best.value, s.refine_evals,
             s.seed + static_cast<std::uint64_t>(j), j, est.witnesses);
      for (size_t i = before; i < est.witnesses.size(); ++i) level_min = std::min(level_min, est.witnesses[i].quotient);
    }
    est.level_minima.push_back(level_min);
    carried.reset();
    if (std::isfinite(level_min) && rad > 0) {
      for (auto it = est.witnesses.rbegin(); it != est.witnesses.rend() && it->level == j; ++it) {
        if (it->quotient == level_min) {
          carried = (it->direction - centre) / rad;
          break;
        }
      }
    }
  }
  double lo = kInf;
  for (const auto& w : est.witnesses) lo = std::min(lo, w.quotient);
  est.diverging = est.level_minima.back() >= s.divergence_threshold;
  est.value = est.diverging || !std::isfinite(lo) ? ExtReal::infinity() : ExtReal(lo);
  return est;
}

double base_value(const Evaluable& f, const Vec& x_bar, const char* who) {
  const ExtReal fb = f(x_bar);
  if (fb.is_infinite()) throw DomainError(std::string(who) + ": f(x̄) = +inf");
  return fb.value();
}

}  // namespace

Evaluable make_evaluable(const CompositeProblem& p, double tol) {
  return [&p, tol](const Vec& x) { return eval_f(p, x, tol); };
}

void GridSchedule::validate() const {
  if (!(t0 > 0) || !(ratio > 0 && ratio < 1) || levels < 1 || !(c >= 0) || directions < 0 || refine_evals < 0 ||
      !(divergence_threshold > 0)) {
    throw DomainError("GridSchedule: invalid parameters");
  }
}

double GridSchedule::t(int level) const { return t0 * std::pow(ratio, level); }

LiminfEstimate est_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& w, const GridSchedule& sched) {
  require_dim(w.size(), x_bar.size(), "est_subderivative");
  const double fb = base_value(f, x_bar, "est_subderivative");
  return run_grid(sched, w, [&](double t, const Vec& d) {
    const ExtReal v = f(x_bar + t * d);
    return v.is_infinite() ? kInf : (v.value() - fb) / t;
  });
}

LiminfEstimate est_second_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& v, const Vec& w,
                                        const GridSchedule& sched) {
  require_dim(w.size(), x_bar.size(), "est_second_subderivative");
  require_dim(v.size(), x_bar.size(), "est_second_subderivative: v");
  const double fb = base_value(f, x_bar, "est_second_subderivative");
  return run_grid(sched, w, [&](double t, const Vec& d) {
    const ExtReal val = f(x_bar + t * d);
    return val.is_infinite() ? kInf : (val.value() - fb - t * v.dot(d)) / (0.5 * t * t);
  });
}

LiminfEstimate est_parabolic_subderivative(const Evaluable& f, const Vec& x_bar, const Vec& w, double df_val,
                                           const Vec& z, const GridSchedule& sched) {
  require_dim(w.size(), x_bar.size(), "est_parabolic_subderivative");
  require_dim(z.size(), x_bar.size(), "est_parabolic_subderivative: z");
  if (!std::isfinite(df_val)) throw DomainError("est_parabolic_subderivative: df value must be finite");
  const double fb = base_value(f, x_bar, "est_parabolic_subderivative");
  return run_grid(sched, z, [&](double t, const Vec& d) {
    const ExtReal val = f(x_bar + t * w + 0.5 * t * t * d);
    return val.is_infinite() ? kInf : (val.value() - fb - t * df_val) / (0.5 * t * t);
  });
}

void write_witness_csv(const LiminfEstimate& e, std::ostream& os) {
  const int n = e.witnesses.empty() ? 0 : static_cast<int>(e.witnesses.front().direction.size());
  os << "level,t";
  for (int i = 0; i < n; ++i) os << ",d" << i;
  os << ",quotient\n";
  os.precision(17);
  for (const auto& w : e.witnesses) {
    os << w.level << ',' << w.t;
    for (int i = 0; i < n; ++i) os << ',' << w.direction(i);
    os << ',';
    if (std::isfinite(w.quotient)) os << w.quotient;
    else os << "inf";
    os << '\n';
  }
}

std::string to_string(ProbeStrategy s) {
  return s == ProbeStrategy::kPaperSequences ? "paper-sequences" : "pair-grid";
}

namespace {

struct PairTest {
  const GradientProbe& grad;
  const Vec& x_bar;
  const Vec& v_bar;
  double r_max;
  double eps;
  FalsifyResult& res;

  // Returns true when the pair violates the inequality at scale r_max.
  bool operator()(const Vec& x1, const Vec& x2, const std::string& source) {
    ++res.probes;
    if ((x1 - x_bar).norm() > eps || (x2 - x_bar).norm() > eps || (x1 - x2).norm() == 0.0) {
      ++res.rejected;
      return false;
    }
    Vec v1, v2;
    try {
      v1 = grad(x1);
      v2 = grad(x2);
    } catch (const EvalError&) {
      ++res.rejected;
      return false;
    }
    if ((v1 - v_bar).norm() > eps || (v2 - v_bar).norm() > eps) {
      ++res.rejected;
      return false;
    }
    const double lhs = (v2 - v1).dot(x2 - x1);
    const double rhs = -r_max * (x2 - x1).squaredNorm();
    if (lhs < rhs) {
      res.counterexample = Counterexample{x1, x2, v1, v2, r_max, lhs, rhs, source};
      return true;
    }
    return false;
  }
};

}  // namespace

FalsifyResult prox_regularity_falsify(const GradientProbe& grad, const Vec& x_bar, const Vec& v_bar, double r_max,
                                      double eps, ProbeStrategy strategy, const FalsifyBudget& budget) {
  require_dim(v_bar.size(), x_bar.size(), "prox_regularity_falsify");
  if (!(r_max > 0) || !(eps > 0)) throw DomainError("prox_regularity_falsify: r_max and eps must be positive");
  FalsifyResult res;
  res.eps = eps;
  PairTest test{grad, x_bar, v_bar, r_max, eps, res};
  const int n = static_cast<int>(x_bar.size());

  if (strategy == ProbeStrategy::kPaperSequences) {
    struct Family {
      const char* name;
      double (*u)(double);
      double (*x)(double);
    };
    const Family families[] = {
        {"u_k=1/(2k pi), x_k=1/(pi/2+2k pi)", [](double k) { return 1.0 / (2 * k * std::numbers::pi); },
         [](double k) { return 1.0 / (std::numbers::pi / 2 + 2 * k * std::numbers::pi); }},
        {"u_k=1/sqrt(2k pi), x_k=1/sqrt(pi/2+2k pi)",
         [](double k) { return 1.0 / std::sqrt(2 * k * std::numbers::pi); },
         [](double k) { return 1.0 / std::sqrt(std::numbers::pi / 2 + 2 * k * std::numbers::pi); }},
    };
    for (const auto& fam : families) {
      // Smallest k whose probes fit in the ε-ball.
      long k = 1;
      while (k < budget.max_k && fam.u(static_cast<double>(k)) > eps) k = std::max(k + 1, k * 2);
      k = std::max(1L, k / 2);
      for (; k <= budget.max_k; ++k) {
        const double u = fam.u(static_cast<double>(k));
        const double xs = fam.x(static_cast<double>(k));
        for (int i = 0; i < n; ++i) {
          for (double sgn : {1.0, -1.0}) {
            const Vec e = sgn * Vec::Unit(n, i);
            if (test(x_bar + u * e, x_bar + xs * e, std::string(fam.name) + ", k=" + std::to_string(k))) return res;
          }
        }
      }
    }
    if (res.probes == res.rejected) throw EvalError("prox_regularity_falsify: no differentiable probe points found");
    return res;
  }

  QuasiRandom qr(2 * n + 2, budget.seed);
  for (long p = 0; p < budget.pairs; ++p) {
    const Vec c = qr.cube(static_cast<std::uint64_t>(p));
    // Pair = ball point plus a nearby partner at a dyadic scale.
    Vec g1(n), g2(n);
    for (int i = 0; i < n; ++i) {
      g1(i) = 2 * c(i) - 1;
      g2(i) = 2 * c(n + i) - 1;
    }
    const double scale = std::pow(2.0, -static_cast<double>(p % 40));
    const Vec x1 = x_bar + eps * c(2 * n) * g1 / std::max(1.0, g1.norm());
    const Vec x2 = x1 + eps * scale * g2 / std::max(1e-300, g2.norm()) * c(2 * n + 1);
    if (test(x1, x2, "pair-grid #" + std::to_string(p))) return res;
  }
  if (res.probes == res.rejected) throw EvalError("prox_regularity_falsify: no differentiable probe points found");
  return res;
}

std::vector<FalsifyResult> prox_regularity_sweep(const GradientProbe& grad, const Vec& x_bar, const Vec& v_bar,
                                                 double r_max, const std::vector<double>& eps_values,
                                                 ProbeStrategy strategy, const FalsifyBudget& budget) {
  std::vector<FalsifyResult> out;
  for (double e : eps_values) out.push_back(prox_regularity_falsify(grad, x_bar, v_bar, r_max, e, strategy, budget));
  return out;
}

bool verify_counterexample(const GradientProbe& grad, const Counterexample& ce) {
  const Vec v1 = grad(ce.x1);
  const Vec v2 = grad(ce.x2);
  long double lhs = 0, nrm = 0;
  for (int i = 0; i < ce.x1.size(); ++i) {
    const long double dx = static_cast<long double>(ce.x2(i)) - ce.x1(i);
    lhs += (static_cast<long double>(v2(i)) - v1(i)) * dx;
    nrm += dx * dx;
  }
  return lhs < -static_cast<long double>(ce.r) * nrm;
}

std::vector<Vec> ball_samples(const Vec& centre, double gamma, int n_samples, std::uint64_t seed) {
  const int n = static_cast<int>(centre.size());
  std::vector<Vec> out;
  for (int j = 0; j < 4 && static_cast<int>(out.size()) < n_samples; ++j) {
    const double r = gamma * std::pow(0.25, j);
    for (int i = 0; i < n && static_cast<int>(out.size()) < n_samples; ++i) {
      out.push_back(centre + r * Vec::Unit(n, i));
      out.push_back(centre - r * Vec::Unit(n, i));
    }
  }
  QuasiRandom qr(n + 1, seed);
  for (std::uint64_t k = 0; static_cast<int>(out.size()) < n_samples; ++k) {
    const Vec b = qr.ball(k);
    if (b.norm() > 0) out.push_back(centre + gamma * b);
  }
  out.resize(static_cast<size_t>(std::min<int>(n_samples, static_cast<int>(out.size()))));
  return out;
}

SampleCheck qgc_sample_check(const Evaluable& f, const Vec& x_bar, double kappa, double gamma, int n_samples,
                             std::uint64_t seed) {
  if (!(kappa > 0) || !(gamma > 0)) throw DomainError("qgc_sample_check: kappa and gamma must be positive");
  const double fb = base_value(f, x_bar, "qgc_sample_check");
  const auto pts = ball_samples(x_bar, gamma, n_samples, seed);
  const auto batch = kernels::evaluate(static_cast<int>(pts.size()), [&](int i) {
    const Vec& x = pts[static_cast<size_t>(i)];
    const ExtReal v = f(x);
    return v.is_infinite() ? kInf : 2 * (v.value() - fb) / (x - x_bar).squaredNorm();
  });
  SampleCheck out;
  out.samples = static_cast<int>(pts.size());
  out.errors = batch.errors;
  const auto worst = kernels::argmin(batch.values);
  out.worst_ratio = worst.index >= 0 ? worst.value : kInf;
  if (worst.index >= 0) out.witness = pts[static_cast<size_t>(worst.index)];
  out.holds = out.worst_ratio >= kappa * (1 - 1e-12) - 1e-14;
  return out;
}

SampleCheck sms_sample_check(const CompositeProblem& p, double kappa, double gamma, int n_samples,
                             std::uint64_t seed) {
  if (!(kappa > 0) || !(gamma > 0)) throw DomainError("sms_sample_check: kappa and gamma must be positive");
  const PolyhedralFn& g = p.polyhedral();
  const auto pts = ball_samples(p.x_bar(), gamma, n_samples, seed);
  constexpr double kSkip = -1.0;
  const auto batch = kernels::evaluate(static_cast<int>(pts.size()), [&](int i) {
    const Vec& x = pts[static_cast<size_t>(i)];
    const Vec Fx = p.F().value(x);
    if (g.value(Fx, 0.0).is_infinite()) return kSkip;
    const Generators sub = map_generators(g.subgradients(Fx, 0.0), p.F().jacobian(x).transpose());
    Generators shifted = sub;
    const Vec gphi = p.phi_gradient(x);
    for (Vec& pt : shifted.points) pt += gphi;
    const double dist = project_onto_polyhedron(hull(shifted), Vec::Zero(p.n())).distance;
    const double r = (x - p.x_bar()).norm();
    return dist <= 0 ? kInf : r / dist;
  });
  SampleCheck out;
  out.errors = batch.errors;
  out.worst_ratio = 0.0;
  for (size_t i = 0; i < batch.values.size(); ++i) {
    const double v = batch.values[i];
    if (std::isnan(v)) continue;
    if (v == kSkip) {
      ++out.skipped;
      continue;
    }
    ++out.samples;
    if (out.witness.size() == 0 || v > out.worst_ratio) {
      out.worst_ratio = v;
      out.witness = pts[i];
    }
  }
  out.holds = out.worst_ratio <= kappa * (1 + 1e-12);
  return out;
}

}  // namespace varcalc
