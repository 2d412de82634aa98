#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "support.hpp"
#include "varcalc/calculus.hpp"
#include "varcalc/catalog.hpp"
#include "varcalc/geometry.hpp"

using namespace varcalc;
using namespace testing;

namespace {

CompositeProblem halfline(std::optional<Vec> v_bar = {}) {
  return CompositeProblem(std::nullopt, SmoothMap::identity(1),
                          PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(1)), v1(0), v_bar);
}

CompositeProblem half_square() {
  return CompositeProblem(SmoothOracle::quadratic(Mat::Identity(1, 1), Vec::Zero(1)), SmoothMap::identity(1),
                          PolyhedralFn::zero(1), v1(0));
}

std::vector<CompositeProblem> nlp_instances() {
  std::vector<CompositeProblem> out;
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const int n = 1 + static_cast<int>(s % 3);
    const int m = 1 + static_cast<int>((s / 3) % 3);
    out.push_back(random_nlp(s, n, m).problem());
  }
  return out;
}

// Generators of K plus random nonnegative combinations of them.
std::vector<Vec> critical_directions(const CompositeProblem& p, Gen& r) {
  const CriticalCone K = critical_cone(p);
  std::vector<Vec> out = K.rays;
  for (const Vec& l : K.lines) {
    out.push_back(l);
    out.push_back(-l);
  }
  for (int k = 0; k < 4 && !K.is_zero(); ++k) {
    Vec w = Vec::Zero(p.n());
    for (const Vec& ray : K.rays) w += r.uniform(0, 1) * ray;
    for (const Vec& l : K.lines) w += r.uniform(-1, 1) * l;
    out.push_back(w);
  }
  out.push_back(Vec::Zero(p.n()));
  return out;
}

}  // namespace

TEST_CASE("metric subregularity check") {
  const MsqcResult a = msqc_check(example_4_6().problem(), 1.0, 200);
  CHECK(a.holds_on_samples);
  CHECK(a.kappa_est <= 1.0 + 1e-9);
  CHECK(msqc_kappa(a) >= 1.0);

  // identity F: distance to dom ψ equals distance to dom g
  const CompositeProblem box(std::nullopt, SmoothMap::identity(2),
                             PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(2)), v2(0, 0));
  const MsqcResult b = msqc_check(box, 0.5, 200);
  CHECK(b.samples > 0);
  CHECK(b.kappa_est == doctest::Approx(1.0));
}

TEST_CASE("subdifferential of psi") {
  const Polyhedron d = psi_subdifferential(example_4_6().problem());
  CHECK(d.contains(v1(-5)));
  CHECK(d.contains(v1(0)));
  CHECK_FALSE(d.contains(v1(0.5)));

  const Vec a = v2(1.5, -0.5);
  const SmoothMap F = SmoothMap::from_exprs({Expr::parse("x0 + x0^2", 1), Expr::parse("2*x0", 1)}, 1);
  const CompositeProblem aff(std::nullopt, F, PolyhedralFn::affine(a), v1(0));
  const Polyhedron da = psi_subdifferential(aff);
  CHECK(da.contains(v1(0.5)));  // ∇F(0)ᵀa = 1.5 − 2·0.5
  CHECK_FALSE(da.contains(v1(0.4)));

  const CompositeProblem interior(std::nullopt, SmoothMap::identity(2),
                                  PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(2)), v2(-1, -1));
  const Polyhedron di = psi_subdifferential(interior);
  CHECK(di.contains(v2(0, 0)));
  CHECK_FALSE(di.contains(v2(0.1, 0)));
}

TEST_CASE("multiplier sets") {
  const MultiplierSet L = multiplier_set(example_4_6().problem());
  CHECK(L.set.contains(v2(2, 0)));
  CHECK(L.set.contains(v2(2, 7)));
  CHECK_FALSE(L.set.contains(v2(1, 0)));
  CHECK(L.set.contains(L.member));
  const Generators G = multiplier_generators(example_4_6().problem());
  REQUIRE(G.points.size() == 1);
  CHECK((G.points[0] - v2(2, 0)).norm() < 1e-9);

  const CompositeProblem aff(std::nullopt, SmoothMap::identity(2), PolyhedralFn::affine(v2(1, 2)), v2(0, 0),
                             v2(1, 2));
  const Generators Ga = multiplier_generators(aff);
  REQUIRE(Ga.points.size() == 1);
  CHECK(Ga.rays.empty());
  CHECK((Ga.points[0] - v2(1, 2)).norm() < 1e-9);

  CHECK_THROWS_AS(multiplier_set(halfline(v1(-1))), InconsistentInput);
}

TEST_CASE("tau bound arithmetic") {
  CHECK(tau_bound(example_4_6().problem(), 1.0, 0.0) == doctest::Approx(2.0));
  CHECK(tau_bound(halfline(), 1.0, 0.0) == 0.0);
  const CompositeProblem l1p(std::nullopt, SmoothMap::identity(1), PolyhedralFn::l1(1), v1(0), v1(1));
  CHECK(tau_bound(l1p, 1.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("max formula examples") {
  const CompositeProblem ex = example_4_6().problem();
  CHECK(d2_psi_max_formula(ex, v1(0)).value.value() == 0.0);
  CHECK(d2_psi_max_formula(ex, v1(1)).value.is_infinite());
  CHECK(d2_psi_max_formula(halfline(), v1(-1)).value.value() == 0.0);
  CHECK_FALSE(is_critical(ex, v1(1)));
  CHECK(is_critical(ex, v1(0)));
  CHECK(critical_cone(ex).is_zero());
}

TEST_CASE("dual pair examples") {
  const DualPair a = d2_psi_dual_pair(example_4_6().problem(), v1(0));
  CHECK(a.primal.value() == 0.0);
  CHECK(a.dual.value() == 0.0);
  const DualPair b = d2_psi_dual_pair(halfline(), v1(-1));
  CHECK(b.primal.value() == 0.0);
  CHECK(b.dual.value() == 0.0);
  CHECK_THROWS_AS(d2_psi_dual_pair(halfline(v1(-1)), v1(-1)), InconsistentInput);
}

TEST_CASE("graphical derivative examples") {
  const GraphDerivValue q = sum_rule_graphical(half_square(), v1(0.75));
  REQUIRE_FALSE(q.empty);
  REQUIRE(q.generators.points.size() == 1);
  CHECK(q.generators.points[0](0) == doctest::Approx(0.75));
  CHECK(q.generators.rays.empty());
  CHECK(q.generators.lines.empty());

  // tangent cone of the graph of the normal cone of ℝ₋ at the origin
  const GraphDerivValue h = sum_rule_graphical(halfline(), v1(0));
  REQUIRE_FALSE(h.empty);
  REQUIRE(h.set);
  CHECK(h.set->contains(v1(0)));
  CHECK(h.set->contains(v1(3)));
  CHECK_FALSE(h.set->contains(v1(-1)));

  const CompositeProblem ex = example_4_6().problem();
  const GraphDerivValue e = psi_graphical_derivative(ex, v1(0));
  REQUIRE_FALSE(e.empty);
  CHECK(e.generators.lines.size() == 1);
  CHECK(psi_graphical_derivative(ex, v1(1)).empty);
}

TEST_CASE("sum rules examples") {
  CHECK(sum_rule_second_subderivative(half_square(), v1(1)).value() == doctest::Approx(1.0));
  CHECK(sum_rule_second_subderivative(example_4_6().problem(), v1(1)).is_infinite());
  CHECK(sum_rule_parabolic(half_square(), v1(1), v1(0)).value() == doctest::Approx(1.0));
  CHECK(sum_rule_parabolic(halfline(), v1(0), v1(-1)).value() == 0.0);
  CHECK(sum_rule_parabolic(halfline(), v1(0), v1(1)).is_infinite());
  CHECK(chain_rule_parabolic(example_4_6().problem(), v1(1), v1(0)).value() == 0.0);
  CHECK_THROWS_AS(chain_rule_parabolic(halfline(), v1(1), v1(0)), DomainError);
}

TEST_CASE("chain rule with identity reduces to the parabolic subderivative of g") {
  Gen r(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = r.integer(1, 3);
    Vec y = r.dyadic_vec(m, 1);
    for (int i = 0; i < m; ++i)
      if (r.integer(0, 1) == 0) y(i) = 0;
    const PolyhedralFn g = r.integer(0, 1) == 0 ? PolyhedralFn::l1(m) : PolyhedralFn::linf(m);
    const CompositeProblem p(std::nullopt, SmoothMap::identity(m), g, y, Vec(Vec::Zero(m)));
    const Vec w = r.dyadic_vec(m, 1), z = r.dyadic_vec(m, 2);
    CHECK(chain_rule_parabolic(p, w, z) == g_parabolic_subderivative(g, y, w, z));
  }
}

TEST_CASE("primal and dual values agree on critical directions") {
  Gen r(5);
  int checked = 0;
  for (const CompositeProblem& p : nlp_instances()) {
    for (const Vec& w : critical_directions(p, r)) {
      const DualPair d = d2_psi_dual_pair(p, w);
      REQUIRE(d.primal.is_finite());
      REQUIRE(d.dual.is_finite());
      CHECK(d.primal.value() == doctest::Approx(d.dual.value()).epsilon(1e-8).scale(1.0));
      ++checked;
    }
  }
  CHECK(checked >= 60);
}

TEST_CASE("second subderivative is positively homogeneous of degree two") {
  Gen r(7);
  for (const CompositeProblem& p : nlp_instances()) {
    std::vector<Vec> dirs = critical_directions(p, r);
    for (int k = 0; k < 3; ++k) dirs.push_back(r.unit(p.n()));
    for (const Vec& w : dirs) {
      const ExtReal base = sum_rule_second_subderivative(p, w);
      for (double lambda : {2.0, 0.5}) {
        const ExtReal scaled = sum_rule_second_subderivative(p, lambda * w);
        CHECK(scaled.is_finite() == base.is_finite());
        if (base.is_finite() && scaled.is_finite()) {
          CHECK(scaled.value() == doctest::Approx(lambda * lambda * base.value()).epsilon(1e-8).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("max formula is finite exactly on the critical cone") {
  Gen r(11);
  for (const CompositeProblem& p : nlp_instances()) {
    for (int k = 0; k < 6; ++k) {
      const Vec w = r.unit(p.n());
      CHECK(d2_psi_max_formula(p, w).value.is_finite() == is_critical(p, w));
    }
    for (const Vec& w : critical_directions(p, r)) CHECK(is_critical(p, w));
  }
}

TEST_CASE("graphical derivative pairs with the second subderivative") {
  Gen r(13);
  int pairs = 0;
  for (const CompositeProblem& p : nlp_instances()) {
    for (const Vec& w : critical_directions(p, r)) {
      const GraphDerivValue D = psi_graphical_derivative(p, w);
      REQUIRE_FALSE(D.empty);
      const double d2 = d2_psi_max_formula(p, w).value.value();
      for (const Vec& z : D.generators.points) {
        CHECK(z.dot(w) == doctest::Approx(d2).epsilon(1e-8).scale(1.0 + w.squaredNorm()));
        ++pairs;
      }
      // directions of the normal-cone part are orthogonal to w
      for (const Vec& ray : D.generators.rays) CHECK(std::abs(ray.dot(w)) <= 1e-8 * (1 + w.norm()));
      for (const Vec& l : D.generators.lines) CHECK(std::abs(l.dot(w)) <= 1e-8 * (1 + w.norm()));
    }
  }
  CHECK(pairs >= 60);
}

TEST_CASE("chain-rule finiteness matches the second-order tangent set of dom g") {
  Gen r(17);
  int finite = 0, infinite = 0;
  for (const CompositeProblem& p : nlp_instances()) {
    const Polyhedron dom = p.polyhedral().domain();
    for (const Vec& w : critical_directions(p, r)) {
      const Vec u = p.jacobian() * w;
      const Polyhedron T2 = second_order_tangent_set(dom, p.F_bar(), u);
      for (int k = 0; k < 4; ++k) {
        const Vec z = r.vec(p.n(), -2, 2);
        const Vec target = p.jacobian() * z + second_order_term(p.F_hessians(), w);
        const ExtReal v = chain_rule_parabolic(p, w, z);
        // skip draws that land on the boundary of T²
        if (std::abs(T2.violation(target)) < 1e-7 && T2.violation(target) > 0) continue;
        CHECK(v.is_finite() == T2.contains(target));
        (v.is_finite() ? finite : infinite)++;
      }
    }
  }
  CHECK(finite > 20);
  CHECK(infinite > 20);
}

TEST_CASE("parabolic regularity holds and the minimizer realizes it") {
  Gen r(19);
  for (const CompositeProblem& p : nlp_instances()) {
    for (const Vec& w : critical_directions(p, r)) {
      const ParabolicRegularity pr = parabolic_regularity_check(p, w);
      REQUIRE(pr.lhs.is_finite());
      REQUIRE(pr.rhs.is_finite());
      CHECK(pr.lhs.value() == doctest::Approx(pr.rhs.value()).epsilon(1e-8).scale(1.0));
      const ExtReal at = chain_rule_parabolic(p, w, pr.z_bar);
      REQUIRE(at.is_finite());
      CHECK(at.value() - pr.z_bar.dot(p.v_bar()) == doctest::Approx(pr.rhs.value()).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("tau ball meets the argmax set") {
  for (const CompositeProblem& p : nlp_instances()) {
    const MsqcResult ms = msqc_check(p, 0.1, 128);
    const double tau = tau_bound(p, msqc_kappa(ms), p.polyhedral().lipschitz());
    Gen r(23);
    for (const Vec& w : critical_directions(p, r)) {
      const TauAttainment t = tau_attainment(p, w, tau);
      CHECK(t.attained);
      if (t.attained) CHECK(t.norm <= tau * (1 + 1e-9));
    }
  }
}
