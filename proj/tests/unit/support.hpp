#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/polyhedral_fn.hpp"
#include "varcalc/problem.hpp"

namespace testing {

using varcalc::Mat;
using varcalc::Vec;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Seeded generator shared by the property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  // small dyadic rationals keep piecewise-linear arithmetic exact
  double dyadic(int range = 4) { return integer(-range * 4, range * 4) / 4.0; }

  Vec vec(int n, double lo = -1, double hi = 1) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Vec dyadic_vec(int n, int range = 4) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = dyadic(range);
    return v;
  }
  Mat mat(int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform(-1, 1);
    return m;
  }
  Mat spd(int n, double shift = 0.5) {
    Mat b = mat(n, n);
    return b * b.transpose() + shift * Mat::Identity(n, n);
  }
  Vec unit(int n) {
    Vec v = vec(n);
    while (v.norm() < 1e-3) v = vec(n);
    return v / v.norm();
  }
};

inline Vec v1(double a) { return (Vec(1) << a).finished(); }
inline Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
inline Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

// ψ = δ_{ℝ^n_-} with F = identity and φ = 0
inline varcalc::CompositeProblem orthant_problem(int n, std::optional<Vec> x_bar = {}) {
  using namespace varcalc;
  return CompositeProblem(std::nullopt, SmoothMap::identity(n),
                          PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(n)),
                          x_bar ? *x_bar : Vec(Vec::Zero(n)));
}

// Smallest eigenvalue by bisection on the Sylvester inertia of Q − σI.
inline double lambda_min_bisect(const Mat& Q) {
  const int n = static_cast<int>(Q.rows());
  auto negatives = [&](double sigma) {
    Mat a = Q - sigma * Mat::Identity(n, n);
    int neg = 0;
    for (int k = 0; k < n; ++k) {
      double piv = a(k, k);
      if (std::fabs(piv) < 1e-300) piv = -1e-300;
      if (piv < 0) ++neg;
      for (int i = k + 1; i < n; ++i) {
        const double l = a(i, k) / piv;
        for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      }
    }
    return neg;
  };
  double lo = -1, hi = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lo -= std::fabs(Q(i, j));
      hi += std::fabs(Q(i, j));
    }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (negatives(mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testing
