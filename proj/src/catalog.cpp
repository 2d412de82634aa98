#include "varcalc/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "varcalc/calculus.hpp"
#include "varcalc/geometry.hpp"
#include "varcalc/growth.hpp"

namespace varcalc {

std::string to_string(Evidence e) {
  switch (e) {
    case Evidence::kPublished: return "published";
    case Evidence::kDerived: return "derived";
    case Evidence::kElementary: return "elementary";
  }
  return "?";
}

namespace pathological {

namespace {

double slope(long n) {
  const double a = static_cast<double>(n);
  return (2 * a + 1) * (2 * a * a + 2 * a + 1) / (a * a * a * (a + 1) * (a + 1) * (a + 1));
}

// Piece index n with x ∈ [1/(n+1), 1/n), for 0 < x < 1.
long piece(double x) {
  long n = static_cast<long>(std::ceil(1.0 / x)) - 1;
  n = std::max(n, 1L);
  while (x < 1.0 / static_cast<double>(n + 1)) ++n;
  while (n > 1 && x >= 1.0 / static_cast<double>(n)) --n;
  return n;
}

bool beyond_clamp(double x) { return 1.0 / x > static_cast<double>(kNMax); }

bool at_breakpoint(double x) {
  if (x > 1.0) return false;
  const double n = std::round(1.0 / x);
  return n >= 1 && 1.0 / n == x;
}

}  // namespace

double wiggle_value(double x) {
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  const double osc = std::pow(x, 10.0 / 3.0) * std::cos(1.0 / x);
  if (x >= 1.0) return osc + std::pow(x, 4);
  if (beyond_clamp(x)) return 0.0;
  const long n = piece(x);
  const double left = 1.0 / static_cast<double>(n + 1);
  // The linear correction interpolates x⁴ at 1/(n+1) and 1/n.
  return osc + std::pow(left, 4) + slope(n) * (x - left);
}

double wiggle_gradient(double x) {
  const double s = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  if (at_breakpoint(x)) throw EvalError("wiggle_gradient: not differentiable at 1/n");
  const double osc = 10.0 / 3.0 * std::pow(x, 7.0 / 3.0) * std::cos(1.0 / x) + std::pow(x, 4.0 / 3.0) * std::sin(1.0 / x);
  if (x > 1.0) return s * (osc + 4 * x * x * x);
  if (beyond_clamp(x)) return 0.0;
  return s * (osc + slope(piece(x)));
}

double wiggle_hessian(double x) {
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  if (at_breakpoint(x)) throw EvalError("wiggle_hessian: not differentiable at 1/n");
  if (x < 1.0 && beyond_clamp(x)) return 0.0;
  const double c = std::cos(1.0 / x), sn = std::sin(1.0 / x);
  double h = 70.0 / 9.0 * std::pow(x, 4.0 / 3.0) * c + 14.0 / 3.0 * std::cbrt(x) * sn - c / std::pow(x, 2.0 / 3.0);
  if (x > 1.0) h += 12 * x * x;
  return h;
}

double wiggle_breakpoint_gap(int count) {
  double gap = 0;
  for (int n = 1; n <= count; ++n) {
    const double x = 1.0 / n;
    const double a = n;
    // Linear parts exactly as printed, on both sides of 1/n.
    const double from_left = slope(n) * x + 1 / std::pow(a + 1, 3) - 1 / std::pow(a, 3);
    const double from_right = n == 1 ? std::pow(x, 4) : slope(n - 1) * x + 1 / std::pow(a, 3) - 1 / std::pow(a - 1, 3);
    gap = std::max(gap, std::abs(from_left - from_right));
  }
  return gap;
}

double oscillatory_integrand(double x) { return x == 0.0 ? 0.0 : x * x * std::sin(1.0 / (x * x)); }

double oscillatory_integrand_derivative(double x) {
  if (x == 0.0) return 0.0;
  const double u = 1.0 / (x * x);
  return 2 * x * std::sin(u) - 2.0 / x * std::cos(u);
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

double gk(const std::function<double(double)>& f, double a, double b) {
  double err = 0;
  const double v = GK::integrate(f, a, b, 15, 1e-13, &err);
  if (!(err <= 1e-10 * std::max(1.0, std::abs(v)))) throw NumericalError("quadrature did not converge");
  return v;
}

// ∫_S^∞ sin(s) s^{-a} ds by repeated integration by parts; error O(S^{-a-4}).
double sine_tail(double S, double a) {
  const double c = std::cos(S), s = std::sin(S);
  return c * std::pow(S, -a) + a * s * std::pow(S, -a - 1) - a * (a + 1) * c * std::pow(S, -a - 2) -
         a * (a + 1) * (a + 2) * s * std::pow(S, -a - 3);
}

// ∫₀ˣ t² sin(1/t²) dt for 0 < x ≤ 1 as ½∫_{1/x²}^∞ sin(s) s^{-5/2} ds.
double integral_unit(double x) {
  const double S0 = 1.0 / (x * x);
  constexpr double kS1 = 2000.0;
  auto h = [](double s) { return std::sin(s) * std::pow(s, -2.5); };
  double total = 0;
  double a = S0;
  if (S0 < kS1) {
    double b = std::ceil(S0 / std::numbers::pi) * std::numbers::pi;
    if (b <= a) b += std::numbers::pi;
    while (a < kS1) {
      total += gk(h, a, b);
      a = b;
      b += std::numbers::pi;
    }
  }
  return 0.5 * (total + sine_tail(a, 2.5));
}

}  // namespace

double oscillatory_integral(double x) {
  const double s = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  if (x <= 1.0) return s * integral_unit(x);
  return s * (integral_unit(1.0) + gk(oscillatory_integrand, 1.0, x));
}

}  // namespace pathological

namespace {

using namespace pathological;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

Vec scalar(double x) { return Vec::Constant(1, x); }
Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }

SmoothOracle wiggle_oracle(double linear) {
  return SmoothOracle(
      1, [linear](const Vec& x) { return linear * x(0) + wiggle_value(x(0)); },
      [linear](const Vec& x) { return scalar(linear + wiggle_gradient(x(0))); },
      [](const Vec& x) { return Mat::Constant(1, 1, wiggle_hessian(x(0))); }, true);
}

GradientProbe scalar_probe(double (*g)(double)) {
  return [g](const Vec& x) { return scalar(g(x(0))); };
}

Fact falsifier_fact(const std::string& seq, GradientProbe grad) {
  return {"prox-regularity falsified (r_max = 1e3, eps in {1e-1, 1e-2})",
          "verified counterexample from the sequences " + seq, Evidence::kPublished, [grad] {
            FactOutcome o{true, ""};
            for (double eps : {1e-1, 1e-2}) {
              const FalsifyResult r =
                  prox_regularity_falsify(grad, scalar(0), scalar(0), 1e3, eps, ProbeStrategy::kPaperSequences);
              const bool ok = r.counterexample && verify_counterexample(grad, *r.counterexample);
              o.ok = o.ok && ok;
              o.observed += (o.observed.empty() ? "" : "; ") + std::string("eps=") + fmt(eps) + ": " +
                            (r.counterexample ? r.counterexample->source + (ok ? " (verified)" : " (NOT verified)")
                                              : "none");
            }
            return o;
          }};
}

}  // namespace

CatalogEntry example_3_2() {
  CatalogEntry e;
  e.id = "example_3_2";
  e.description = "x^{10/3}cos(1/x) with linear corrections: extended twice differentiable at 0, not prox-regular";
  e.problem = [] {
    return CompositeProblem(wiggle_oracle(0.0), SmoothMap::identity(1), PolyhedralFn::zero(1), scalar(0));
  };
  e.gradient = scalar_probe(wiggle_gradient);
  e.facts.push_back({"g(0)", "0", Evidence::kPublished, [] {
                       const double v = wiggle_value(0.0);
                       return FactOutcome{v == 0.0, fmt(v)};
                     }});
  e.facts.push_back({"extended Hessian", "grad g(0) = 0 and A = 0 with residuals under the displayed bound",
                     Evidence::kPublished, [] {
                       const SmoothOracle o = wiggle_oracle(0.0);
                       std::vector<Vec> samples;
                       for (int j = 1; j <= 24; ++j) samples.push_back(scalar(0.37 * std::pow(2.0, -j)));
                       const auto res = extended_hessian_residual(o, scalar(0), Mat::Zero(1, 1), samples);
                       bool ok = o.gradient(scalar(0))(0) == 0.0;
                       for (size_t i = 0; i < samples.size(); ++i) {
                         const double x = samples[i](0);
                         const long n = static_cast<long>(std::ceil(1.0 / x)) - 1;
                         const double a = static_cast<double>(n);
                         const double bound = 10.0 / 3.0 * std::pow(x, 4.0 / 3.0) + std::cbrt(x) +
                                              (2 * a + 1) * (2 * a * a + 2 * a + 1) / (a * a * a * (a + 1) * (a + 1));
                         ok = ok && res[i] <= bound * (1 + 1e-9);
                       }
                       ok = ok && res.back() < 1e-2 && res.back() < res.front();
                       return FactOutcome{ok, "residual " + fmt(res.front()) + " -> " + fmt(res.back())};
                     }});
  e.facts.push_back(falsifier_fact("u_k = 1/(2k pi), x_k = 1/(pi/2 + 2k pi)", e.gradient));
  e.facts.push_back({"evenness", "g(x) = g(-x) on a grid", Evidence::kPublished, [] {
                       for (int i = 1; i <= 1000; ++i) {
                         const double x = 2.0 * i / 1000.0 + 1e-7;
                         if (wiggle_value(x) != wiggle_value(-x)) return FactOutcome{false, "asymmetric at " + fmt(x)};
                       }
                       return FactOutcome{true, "symmetric on 1000 points"};
                     }});
  e.facts.push_back({"continuity at 1/n", "jump <= 1e-9 for n <= 1e4", Evidence::kDerived, [] {
                       const double gap = wiggle_breakpoint_gap(10000);
                       return FactOutcome{gap <= 1e-9, "max jump " + fmt(gap)};
                     }});
  return e;
}

CatalogEntry example_3_3() {
  CatalogEntry e;
  e.id = "example_3_3";
  e.description = "integral of t^2 sin(1/t^2): twice differentiable, not prox-regular at 0";
  e.problem = [] {
    SmoothOracle phi(
        1, [](const Vec& x) { return oscillatory_integral(x(0)); },
        [](const Vec& x) { return scalar(oscillatory_integrand(x(0))); },
        [](const Vec& x) { return Mat::Constant(1, 1, oscillatory_integrand_derivative(x(0))); });
    return CompositeProblem(phi, SmoothMap::identity(1), PolyhedralFn::zero(1), scalar(0));
  };
  e.gradient = scalar_probe(oscillatory_integrand);
  e.facts.push_back({"derivatives at 0", "f'(0) = 0, f''(0) = 0", Evidence::kPublished, [] {
                       const double g = oscillatory_integrand(0), h = oscillatory_integrand_derivative(0);
                       return FactOutcome{g == 0.0 && h == 0.0, fmt(g) + ", " + fmt(h)};
                     }});
  e.facts.push_back(falsifier_fact("u_k = 1/sqrt(2k pi), x_k = 1/sqrt(pi/2 + 2k pi)", e.gradient));
  e.facts.push_back({"cubic bound", "|f(x)| <= |x|^3/3 on 1000 grid points of [-1,1]", Evidence::kDerived, [] {
                       double worst = -1;
                       for (int i = 0; i < 1000; ++i) {
                         const double x = -1.0 + 2.0 * i / 999.0;
                         worst = std::max(worst, std::abs(oscillatory_integral(x)) - std::pow(std::abs(x), 3) / 3);
                       }
                       return FactOutcome{worst <= 1e-12, "max(|f| - |x|^3/3) = " + fmt(worst)};
                     }});
  return e;
}

namespace {

CompositeProblem example_4_6_problem() {
  const auto F = SmoothMap::from_exprs({Expr::parse("-x", 1), Expr::parse("-x^3", 1)}, 1);
  return CompositeProblem(wiggle_oracle(2.0), F, PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(2)),
                          scalar(0));
}

std::vector<double> unit_grid() {
  std::vector<double> g;
  for (int i = 0; i < 1000; ++i) g.push_back(-1.0 + 2.0 * i / 999.0);
  return g;
}

}  // namespace

CatalogEntry example_4_6() {
  CatalogEntry e;
  e.id = "example_4_6";
  e.description = "min 2x + g(x) subject to -x <= 0, -x^3 <= 0 with g the wiggle function";
  e.problem = example_4_6_problem;
  e.facts.push_back({"MSQC", "d(x, dom psi) <= d(F(x), R^2_-) on 1000 grid points", Evidence::kPublished, [] {
                       const CompositeProblem p = example_4_6_problem();
                       const Polyhedron dom = Polyhedron::nonpositive_orthant(2);
                       double worst = -std::numeric_limits<double>::infinity();
                       for (double x : unit_grid()) {
                         const auto px = project_onto_domain(p, scalar(x));
                         if (!px) return FactOutcome{false, "projection stalled at " + fmt(x)};
                         const double lhs = std::abs(x - (*px)(0));
                         const double rhs = project_onto_polyhedron(dom, p.F().value(scalar(x))).distance;
                         worst = std::max(worst, lhs - rhs);
                       }
                       return FactOutcome{worst <= 1e-12, "max(lhs - rhs) = " + fmt(worst)};
                     }});
  e.facts.push_back({"quadratic growth", "f(x) - f(0) >= x^2 on the feasible grid", Evidence::kPublished, [] {
                       const CompositeProblem p = example_4_6_problem();
                       double worst = std::numeric_limits<double>::infinity();
                       for (double x : unit_grid()) {
                         const ExtReal v = eval_f(p, scalar(x));
                         if (v.is_infinite()) continue;
                         worst = std::min(worst, v.value() - p.f_bar() - x * x);
                       }
                       return FactOutcome{worst >= 0, "min(f - f(0) - x^2) = " + fmt(worst)};
                     }});
  e.facts.push_back({"multipliers", "Lambda(0,-2) has vertex (2,0) and ray (0,1)", Evidence::kDerived, [] {
                       const Generators G = multiplier_generators(example_4_6_problem());
                       const bool ok = G.points.size() == 1 && G.rays.size() == 1 && G.lines.empty() &&
                                       (G.points[0] - vec2(2, 0)).norm() <= 1e-9 &&
                                       (G.rays[0].normalized() - vec2(0, 1)).norm() <= 1e-9;
                       std::ostringstream os;
                       os << G.points.size() << " vertices, " << G.rays.size() << " rays";
                       if (!G.points.empty()) os << ", vertex (" << G.points[0].transpose() << ")";
                       return FactOutcome{ok, os.str()};
                     }});
  e.facts.push_back({"tau", "tau = 2 and (2,0) in Lambda within the 2-ball", Evidence::kDerived, [] {
                       const CompositeProblem p = example_4_6_problem();
                       const double tau = tau_bound(p, 1.0, p.polyhedral().lipschitz());
                       const TauAttainment ta = tau_attainment(p, scalar(0), tau);
                       const bool ok = std::abs(tau - 2) <= 1e-12 && ta.attained &&
                                       multiplier_set(p).set.contains(vec2(2, 0)) && (ta.point - vec2(2, 0)).norm() <= 1e-8;
                       return FactOutcome{ok, "tau = " + fmt(tau) + ", point (" + fmt(ta.point(0)) + ", " +
                                                  fmt(ta.point(1)) + ") via " + ta.method};
                     }});
  e.facts.push_back({"growth battery", "all determined verdicts hold, consistent", Evidence::kPublished, [] {
                       const GrowthReport r = thm43_battery(example_4_6_problem());
                       bool ok = r.consistency;
                       std::string obs;
                       for (const Condition& c : r.cond) {
                         ok = ok && c.verdict != Verdict::kFails;
                         obs += to_string(c.verdict) + " ";
                       }
                       return FactOutcome{ok, obs + (r.consistency ? "(consistent)" : "(INCONSISTENT)")};
                     }});
  e.facts.push_back({"vacuous modulus", "critical cone {0}, QG modulus +inf", Evidence::kDerived, [] {
                       const CompositeProblem p = example_4_6_problem();
                       const QgModulus m = qg_modulus(p);
                       return FactOutcome{critical_cone(p).is_zero() && m.lower.is_infinite() && m.upper.is_infinite(),
                                          "[" + m.lower.to_string() + ", " + m.upper.to_string() + "]"};
                     }});
  return e;
}

namespace {

Mat random_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> N(0.0, 1.0);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = N(rng);
  return M;
}

// c + aᵀx + ½ xᵀPx as an expression tree.
Expr quadratic_expr(double c, const Vec& a, const Mat& P) {
  const int n = static_cast<int>(a.size());
  Expr e = Expr::constant(c);
  for (int i = 0; i < n; ++i) {
    if (a(i) != 0.0) e = e + Expr::constant(a(i)) * Expr::variable(i);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double coef = i == j ? 0.5 * P(i, i) : P(i, j);
      if (coef != 0.0) e = e + Expr::constant(coef) * Expr::variable(i) * Expr::variable(j);
    }
  }
  return e;
}

}  // namespace

CatalogEntry random_qp(std::uint64_t seed, int n) {
  if (n < 1 || n > 8) throw DomainError("random_qp: n must be in 1..8");
  std::mt19937_64 rng(seed);
  const Mat M = random_matrix(rng, n, n);
  const double shift = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  Mat Q = M.transpose() * M / n + shift * Mat::Identity(n, n);
  Q = 0.5 * (Q + Q.transpose());
  CatalogEntry e;
  e.id = "random_qp:" + std::to_string(seed) + ":" + std::to_string(n);
  e.description = "1/2 x'Qx with seeded positive definite Q";
  e.problem = [Q, n] {
    return CompositeProblem(SmoothOracle::quadratic(Q, Vec::Zero(n)), SmoothMap::identity(n), PolyhedralFn::zero(n),
                            Vec::Zero(n));
  };
  e.gradient = [Q](const Vec& x) { return Vec(Q * x); };
  e.facts.push_back({"QG modulus", "lambda_min(Q)", Evidence::kDerived, [Q, e] {
                       const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(Q).eigenvalues()(0);
                       const QgModulus m = qg_modulus(e.problem());
                       const bool ok = m.lower.is_finite() && m.upper.is_finite() &&
                                       std::abs(m.lower.value() - lmin) <= 1e-6 && std::abs(m.upper.value() - lmin) <= 1e-6;
                       return FactOutcome{ok, "[" + m.lower.to_string() + ", " + m.upper.to_string() + "] vs " + fmt(lmin)};
                     }});
  return e;
}

CatalogEntry random_nlp(std::uint64_t seed, int n, int m) {
  if (n < 1 || n > 8 || m < 1 || m > 8) throw DomainError("random_nlp: n and m must be in 1..8");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  int variant = static_cast<int>(seed % 5);
  if (variant == 4 && m < 2) variant = 0;

  Vec Fbar = Vec::Zero(m);
  Vec y = Vec::Zero(m);
  Mat A = random_matrix(rng, m, n);
  std::vector<Mat> P(static_cast<size_t>(m));
  for (auto& Pk : P) {
    const Mat B = random_matrix(rng, n, n);
    Pk = 0.5 * (B + B.transpose()) * 0.5;
  }
  std::vector<bool> active(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) active[static_cast<size_t>(k)] = k == 0 || U(rng) < 0.6;

  std::optional<PolyhedralFn> g;
  std::string gdesc;
  switch (variant) {
    case 0:
    case 4: {
      g = PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(m));
      gdesc = "indicator of the nonpositive orthant";
      for (int k = 0; k < m; ++k) {
        if (active[static_cast<size_t>(k)]) {
          y(k) = U(rng) < 0.7 ? 0.3 + 1.7 * U(rng) : 0.0;
        } else {
          Fbar(k) = -(0.2 + 0.8 * U(rng));
        }
      }
      if (variant == 4) {
        // Opposite gradients on two active constraints: ∇F(x̄)ᵀ is rank deficient on
        // the active set and Λ gains the ray e_0 + e_1.
        gdesc += " with a rank-deficient active Jacobian";
        active[0] = active[1] = true;
        Fbar(0) = Fbar(1) = 0;
        A.row(1) = -A.row(0);
        y(0) = 0.3 + U(rng);
        y(1) = 0.3 + U(rng);
        for (int k = 0; k < 2; ++k) {
          const Mat B = random_matrix(rng, n, n);
          P[static_cast<size_t>(k)] = -(B.transpose() * B) / n;  // concave components
        }
      }
      break;
    }
    case 1: {
      g = PolyhedralFn::max_affine(Mat::Identity(m, m), Vec::Zero(m));
      gdesc = "max of the components";
      double total = 0;
      for (int k = 0; k < m; ++k) {
        if (active[static_cast<size_t>(k)]) {
          y(k) = (k == 0 || U(rng) < 0.7) ? 0.2 + U(rng) : 0.0;
          total += y(k);
        } else {
          Fbar(k) = -(0.2 + 0.8 * U(rng));
        }
      }
      y /= total;
      break;
    }
    case 2: {
      g = PolyhedralFn::l1(m);
      gdesc = "l1 norm";
      for (int k = 0; k < m; ++k) {
        if (active[static_cast<size_t>(k)]) {
          y(k) = U(rng) < 0.6 ? 2 * U(rng) - 1 : (U(rng) < 0.5 ? -1.0 : 1.0);
        } else {
          Fbar(k) = (U(rng) < 0.5 ? -1 : 1) * (0.2 + 0.8 * U(rng));
          y(k) = Fbar(k) > 0 ? 1.0 : -1.0;
        }
      }
      break;
    }
    default: {
      Vec a(m);
      for (int k = 0; k < m; ++k) a(k) = N(rng);
      g = PolyhedralFn::affine(a, 0.0);
      gdesc = "affine";
      y = a;
      for (int k = 0; k < m; ++k) Fbar(k) = N(rng) * 0.5;
      break;
    }
  }

  const Mat S = random_matrix(rng, n, n);
  const double shift = -0.3 + 1.8 * U(rng);
  Mat Q = 0.25 * (S + S.transpose()) + shift * Mat::Identity(n, n);
  Q = 0.5 * (Q + Q.transpose());
  const Vec c = -A.transpose() * y;

  std::vector<Expr> F;
  for (int k = 0; k < m; ++k) F.push_back(quadratic_expr(Fbar(k), A.row(k).transpose(), P[static_cast<size_t>(k)]));

  CatalogEntry e;
  e.id = "random_nlp:" + std::to_string(seed) + ":" + std::to_string(n) + ":" + std::to_string(m);
  e.description = "seeded stationary composite, g = " + gdesc;
  const PolyhedralFn gg = *g;
  e.problem = [Q, c, F, gg, n] {
    return CompositeProblem(SmoothOracle::quadratic(Q, c), SmoothMap::from_exprs(F, n), gg, Vec::Zero(n));
  };
  e.facts.push_back({"stationarity", "the seeded multiplier lies in Lambda", Evidence::kElementary, [e, y] {
                       const MultiplierSet L = multiplier_set(e.problem());
                       const bool ok = L.set.contains(y, 1e-8);
                       return FactOutcome{ok, ok ? "yes" : "seeded multiplier violates Lambda by " + fmt(L.set.violation(y))};
                     }});
  return e;
}

SmoothOracle catalog_phi(const std::string& id) {
  if (id == "example_3_2") return wiggle_oracle(0.0);
  if (id == "example_4_6") return wiggle_oracle(2.0);
  if (id == "example_3_3") return *example_3_3().problem().phi();
  throw DomainError("no catalog phi named " + id);
}

std::vector<std::string> catalog_ids() { return {"example_3_2", "example_3_3", "example_4_6"}; }

CatalogEntry catalog_entry(const std::string& id) {
  if (id == "example_3_2") return example_3_2();
  if (id == "example_3_3") return example_3_3();
  if (id == "example_4_6") return example_4_6();
  auto fields = [&](const std::string& prefix) {
    std::vector<long> out;
    std::stringstream ss(id.substr(prefix.size()));
    std::string part;
    while (std::getline(ss, part, ':')) {
      try {
        size_t used = 0;
        out.push_back(std::stol(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw DomainError("malformed catalog id: " + id);
      }
    }
    return out;
  };
  if (id.rfind("random_qp:", 0) == 0) {
    const auto f = fields("random_qp:");
    if (f.size() != 2 || f[0] < 0) throw DomainError("expected random_qp:<seed>:<n>");
    return random_qp(static_cast<std::uint64_t>(f[0]), static_cast<int>(f[1]));
  }
  if (id.rfind("random_nlp:", 0) == 0) {
    const auto f = fields("random_nlp:");
    if (f.size() != 3 || f[0] < 0) throw DomainError("expected random_nlp:<seed>:<n>:<m>");
    return random_nlp(static_cast<std::uint64_t>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2]));
  }
  throw DomainError("unknown catalog id: " + id);
}

}  // namespace varcalc
