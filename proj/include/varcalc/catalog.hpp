#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/estimators.hpp"
#include "varcalc/problem.hpp"

namespace varcalc {

// Where an expected fact comes from.
enum class Evidence { kPublished, kDerived, kElementary };
std::string to_string(Evidence e);

struct FactOutcome {
  bool ok = false;
  std::string observed;
};

struct Fact {
  std::string name;
  std::string expected;
  Evidence evidence;
  std::function<FactOutcome()> check;
};

struct CatalogEntry {
  std::string id;
  std::string description;
  std::function<CompositeProblem()> problem;
  std::vector<Fact> facts;
  // Gradient of f where it is differentiable (throws EvalError at kinks); empty if unused.
  GradientProbe gradient;
};

namespace pathological {

inline constexpr long kNMax = 10'000'000;

// The piecewise function built from x^{10/3}cos(1/x) with linear corrections on
// [1/(n+1), 1/n); even, with 0 at 0.
double wiggle_value(double x);
// Throws EvalError at ±1/n.
double wiggle_gradient(double x);
// Derivative of wiggle_gradient between breakpoints; 0 at 0 (extended Hessian).
double wiggle_hessian(double x);
// Largest |jump| of wiggle_value across the breakpoints 1/n, n = 1..count.
double wiggle_breakpoint_gap(int count);

// ∫₀ˣ t² sin(1/t²) dt by Gauss–Kronrod on s = 1/t² plus an asymptotic tail.
double oscillatory_integral(double x);
double oscillatory_integrand(double x);
// d/dx of the integrand, 0 at 0.
double oscillatory_integrand_derivative(double x);

}  // namespace pathological

CatalogEntry example_3_2();
CatalogEntry example_3_3();
CatalogEntry example_4_6();

// φ = ½xᵀQx with Q = MᵀM + shift·I from a seeded M, ψ = 0.
CatalogEntry random_qp(std::uint64_t seed, int n);
// Stationary composite with polynomial F, catalog g and convex-perturbed φ at x̄ = 0.
CatalogEntry random_nlp(std::uint64_t seed, int n, int m);

// φ of a fixed example, for problem files: "example_3_2", "example_3_3", "example_4_6".
SmoothOracle catalog_phi(const std::string& id);

std::vector<std::string> catalog_ids();
// Fixed instances by id; random ones as random_qp:<seed>:<n> or random_nlp:<seed>:<n>:<m>.
CatalogEntry catalog_entry(const std::string& id);

}  // namespace varcalc
