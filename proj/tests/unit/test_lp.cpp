#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "support.hpp"
#include "varcalc/lp.hpp"
#include "varcalc/polyhedron.hpp"

using namespace varcalc;
using namespace testing;

namespace {

// Best objective over all basic feasible points, found by solving every n-subset of
// rows as equalities. Only valid when the feasible set is bounded.
std::optional<double> brute_force_lp(const Mat& A, const Vec& b, const Vec& c, bool maximize) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  std::optional<double> best;
  std::vector<int> idx(static_cast<size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Mat S(n, n);
      Vec r(n);
      for (int i = 0; i < n; ++i) {
        S.row(i) = A.row(idx[static_cast<size_t>(i)]);
        r(i) = b(idx[static_cast<size_t>(i)]);
      }
      Eigen::FullPivLU<Mat> lu(S);
      if (lu.rank() < n) return;
      const Vec x = lu.solve(r);
      if (((A * x - b).array() > 1e-9).any()) return;
      const double v = c.dot(x);
      if (!best || (maximize ? v > *best : v < *best)) best = v;
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[static_cast<size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("unbounded maximization returns an improving ray") {
  // max y2 s.t. y1 = 2, y >= 0
  LpProblem lp;
  lp.c = v2(0, 1);
  lp.A = -Mat::Identity(2, 2);
  lp.b = Vec::Zero(2);
  lp.E = (Mat(1, 2) << 1, 0).finished();
  lp.d = v1(2);
  lp.sense = LpSense::kMax;
  const LpResult r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::kUnbounded);
  CHECK(r.ray(0) == doctest::Approx(0.0).scale(1.0));
  CHECK(r.ray(1) == doctest::Approx(1.0));
}

TEST_CASE("zero objective over the example multiplier set is optimal at (2,0)") {
  // {y >= 0, -y1 - 3*0*y2 = -2} written as y1 = 2
  LpProblem lp;
  lp.c = Vec::Zero(2);
  lp.A = -Mat::Identity(2, 2);
  lp.b = Vec::Zero(2);
  lp.E = (Mat(1, 2) << -1, 0).finished();
  lp.d = v1(-2);
  lp.sense = LpSense::kMax;
  const LpResult r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.value == 0.0);
  CHECK(r.x(0) == doctest::Approx(2.0));
  CHECK(r.x(1) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("infeasible rows produce a valid Farkas certificate") {
  // y <= -1 and -y <= 0
  LpProblem lp;
  lp.c = v1(0);
  lp.A = (Mat(2, 1) << 1, -1).finished();
  lp.b = v2(-1, 0);
  lp.E = Mat(0, 1);
  lp.d = Vec(0);
  const LpResult r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::kInfeasible);
  CHECK(r.farkas_ineq.minCoeff() >= 0.0);
  CHECK((lp.A.transpose() * r.farkas_ineq).norm() < 1e-9);
  CHECK(lp.b.dot(r.farkas_ineq) < 0.0);
}

TEST_CASE("capacity limits are enforced") {
  LpProblem lp;
  lp.c = Vec::Zero(kLpMaxVars + 1);
  lp.A = Mat(0, kLpMaxVars + 1);
  lp.b = Vec(0);
  lp.E = Mat(0, kLpMaxVars + 1);
  lp.d = Vec(0);
  CHECK_THROWS_AS(lp_solve(lp), CapacityError);
}

TEST_CASE("dimension mismatches are rejected") {
  LpProblem lp;
  lp.c = Vec::Zero(2);
  lp.A = Mat::Zero(1, 3);
  lp.b = Vec::Zero(1);
  lp.E = Mat(0, 2);
  lp.d = Vec(0);
  CHECK_THROWS_AS(lp_solve(lp), DimensionError);
}

TEST_CASE("simplex matches vertex enumeration on random bounded LPs") {
  Gen g(2024);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = g.integer(1, 3);
    const int extra = g.integer(0, 4);
    // box rows keep the feasible set bounded
    Mat A(2 * n + extra, n);
    Vec b(2 * n + extra);
    A.topRows(n) = Mat::Identity(n, n);
    A.middleRows(n, n) = -Mat::Identity(n, n);
    b.head(2 * n).setConstant(g.uniform(0.5, 3));
    for (int i = 0; i < extra; ++i) {
      A.row(2 * n + i) = g.dyadic_vec(n, 2).transpose();
      b(2 * n + i) = g.dyadic(2);
    }
    const Vec c = g.dyadic_vec(n, 3);
    const bool maximize = g.integer(0, 1) == 1;
    LpProblem lp;
    lp.c = c;
    lp.A = A;
    lp.b = b;
    lp.E = Mat(0, n);
    lp.d = Vec(0);
    lp.sense = maximize ? LpSense::kMax : LpSense::kMin;
    const LpResult r = lp_solve(lp);
    const auto ref = brute_force_lp(A, b, c, maximize);
    if (!ref) {
      CHECK(r.status == LpStatus::kInfeasible);
      CHECK(r.farkas_ineq.minCoeff() >= 0.0);
      CHECK((A.transpose() * r.farkas_ineq).norm() < 1e-7);
      CHECK(b.dot(r.farkas_ineq) < 0.0);
      ++infeasible;
      continue;
    }
    REQUIRE(r.status == LpStatus::kOptimal);
    ++optimal;
    CHECK(r.value == doctest::Approx(*ref).epsilon(1e-9).scale(1.0));
    CHECK(r.dual_value == doctest::Approx(r.value).epsilon(1e-8).scale(1.0));
    CHECK((A * r.x - b).maxCoeff() <= 1e-9);
    // stationarity and complementary slackness of the reported multipliers
    CHECK((A.transpose() * r.dual_ineq - c).norm() < 1e-8);
    for (int i = 0; i < A.rows(); ++i) {
      CHECK(std::abs(r.dual_ineq(i) * (A.row(i).dot(r.x) - b(i))) < 1e-8);
      if (maximize) CHECK(r.dual_ineq(i) >= -1e-12);
      else CHECK(r.dual_ineq(i) <= 1e-12);
    }
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("equality-constrained LPs satisfy their equalities") {
  Gen g(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(2, 4);
    const Vec x0 = g.vec(n, 0.1, 1);
    LpProblem lp;
    lp.c = g.vec(n);
    lp.A = -Mat::Identity(n, n);
    lp.b = Vec::Zero(n);
    lp.E = Mat::Ones(1, n);
    lp.d = v1(x0.sum());
    const LpResult r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::kOptimal);
    // minimizing over a scaled simplex picks the smallest cost coordinate
    CHECK(r.value == doctest::Approx(x0.sum() * lp.c.minCoeff()));
    CHECK(r.x.sum() == doctest::Approx(x0.sum()));
  }
}

TEST_CASE("feasible_point returns a member or nothing") {
  Gen g(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 4);
    const Mat A = g.mat(n + 2, n);
    const Vec b = g.vec(n + 2, -1, 1);
    const Polyhedron P(A, b);
    const auto x = feasible_point(P);
    if (x) CHECK(P.contains(*x, 1e-8));
    else CHECK(lp_solve(LpProblem::over(P, Vec::Zero(n))).status == LpStatus::kInfeasible);
  }
  CHECK(feasible_point(Polyhedron(Mat((Mat(2, 1) << 1, -1).finished()), v2(-1, 0))) == std::nullopt);
}
