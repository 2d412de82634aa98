#include "varcalc/lp.hpp"

#include <algorithm>
#include <cmath>

namespace varcalc {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

LpProblem LpProblem::over(const Polyhedron& P, const Vec& c, LpSense sense) {
  LpProblem lp;
  P.split(lp.A, lp.b, lp.E, lp.d);
  lp.c = c;
  lp.sense = sense;
  return lp;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kStallPivot = 1e-12;

enum class Outcome { kOptimal, kUnbounded };

// Standard form: min cᵀs over s ≥ 0 with M s = rhs, rhs ≥ 0.
struct Standard {
  Mat M;
  Vec rhs;
  std::vector<int> basis;
  int iterations = 0;
};

struct Factor {
  Eigen::PartialPivLU<Mat> lu;
  Eigen::PartialPivLU<Mat> lut;
};

Factor factor(const Standard& s) {
  Mat B(s.M.rows(), static_cast<Eigen::Index>(s.basis.size()));
  for (size_t i = 0; i < s.basis.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = s.M.col(s.basis[i]);
  Eigen::FullPivLU<Mat> check(B);
  if (B.rows() > 0 && check.rank() < B.rows()) throw NumericalError("lp_solve: singular basis (numerical stall)");
  return Factor{Eigen::PartialPivLU<Mat>(B), Eigen::PartialPivLU<Mat>(Mat(B.transpose()))};
}

Vec basic_costs(const Standard& s, const Vec& cost) {
  Vec cb(static_cast<Eigen::Index>(s.basis.size()));
  for (size_t i = 0; i < s.basis.size(); ++i) cb(static_cast<Eigen::Index>(i)) = cost(s.basis[i]);
  return cb;
}

// Revised simplex with Bland's rule. On unbounded exit, `entering` and `direction`
// describe the improving edge.
Outcome simplex(Standard& s, const Vec& cost, const std::vector<bool>& allowed, int& entering,
                Vec& direction) {
  const int ncols = static_cast<int>(s.M.cols());
  const int max_iter = 50 * (ncols + static_cast<int>(s.M.rows())) + 100;
  const double rc_tol = 1e-10 * (1.0 + cost.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < max_iter; ++iter, ++s.iterations) {
    if (s.M.rows() == 0) {
      for (int j = 0; j < ncols; ++j) {
        if (allowed[static_cast<size_t>(j)] && cost(j) < -rc_tol) {
          entering = j;
          direction = Vec(0);
          return Outcome::kUnbounded;
        }
      }
      return Outcome::kOptimal;
    }
    Factor f = factor(s);
    const Vec xb = f.lu.solve(s.rhs);
    const Vec y = f.lut.solve(basic_costs(s, cost));
    std::vector<bool> in_basis(static_cast<size_t>(ncols), false);
    for (int j : s.basis) in_basis[static_cast<size_t>(j)] = true;

    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (!allowed[static_cast<size_t>(j)] || in_basis[static_cast<size_t>(j)]) continue;
      if (cost(j) - y.dot(s.M.col(j)) < -rc_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return Outcome::kOptimal;

    const Vec col = f.lu.solve(s.M.col(enter));
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < col.size(); ++i) {
      if (col(i) <= kPivotTol) continue;
      const double ratio = std::max(xb(i), 0.0) / col(i);
      if (leave < 0 || ratio < best - 1e-14 ||
          (ratio <= best + 1e-14 && s.basis[static_cast<size_t>(i)] < s.basis[static_cast<size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) {
      entering = enter;
      direction = col;
      return Outcome::kUnbounded;
    }
    if (col(leave) < kStallPivot) throw NumericalError("lp_solve: pivot below 1e-12 (numerical stall)");
    s.basis[static_cast<size_t>(leave)] = enter;
  }
  throw NumericalError("lp_solve: iteration limit reached (numerical stall)");
}

}  // namespace

LpResult lp_solve(const LpProblem& p) {
  const int n = p.num_vars();
  const int k = static_cast<int>(p.A.rows());
  const int e = static_cast<int>(p.E.rows());
  if (k > 0) require_dim(p.A.cols(), n, "lp_solve: A");
  if (e > 0) require_dim(p.E.cols(), n, "lp_solve: E");
  require_dim(p.b.size(), k, "lp_solve: b");
  require_dim(p.d.size(), e, "lp_solve: d");
  if (n > kLpMaxVars || k + e > kLpMaxRows) {
    throw CapacityError("lp_solve: problem exceeds " + std::to_string(kLpMaxVars) + " variables / " +
                        std::to_string(kLpMaxRows) + " rows");
  }
  const double sgn = p.sense == LpSense::kMax ? -1.0 : 1.0;
  const Vec c = sgn * p.c;

  // Columns: x⁺ (n), x⁻ (n), slacks (k), artificials (r).
  const int r = k + e;
  const int n0 = 2 * n + k;
  Standard s;
  s.M = Mat::Zero(r, n0 + r);
  s.rhs.resize(r);
  Vec sigma(r);
  for (int i = 0; i < r; ++i) {
    const bool ineq = i < k;
    const auto row = ineq ? p.A.row(i) : p.E.row(i - k);
    const double rhs = ineq ? p.b(i) : p.d(i - k);
    sigma(i) = rhs < 0 ? -1.0 : 1.0;
    s.M.block(i, 0, 1, n) = sigma(i) * row;
    s.M.block(i, n, 1, n) = -sigma(i) * row;
    if (ineq) s.M(i, 2 * n + i) = sigma(i);
    s.M(i, n0 + i) = 1.0;
    s.rhs(i) = sigma(i) * rhs;
    s.basis.push_back(n0 + i);
  }

  LpResult res;
  int entering = -1;
  Vec direction;

  // Phase 1.
  Vec cost1 = Vec::Zero(n0 + r);
  cost1.tail(r).setOnes();
  std::vector<bool> allowed(static_cast<size_t>(n0 + r), true);
  simplex(s, cost1, allowed, entering, direction);
  const double infeas = r > 0 ? factor(s).lu.solve(s.rhs).dot(basic_costs(s, cost1)) : 0.0;
  const double scale = 1.0 + (r > 0 ? s.rhs.cwiseAbs().maxCoeff() : 0.0);
  if (infeas > 1e-9 * scale) {
    const Vec y = factor(s).lut.solve(basic_costs(s, cost1));
    res.status = LpStatus::kInfeasible;
    res.farkas_ineq = Vec(k);
    res.farkas_eq = Vec(e);
    for (int i = 0; i < k; ++i) res.farkas_ineq(i) = std::max(0.0, -sigma(i) * y(i));
    for (int i = 0; i < e; ++i) res.farkas_eq(i) = -sigma(k + i) * y(k + i);
    res.iterations = s.iterations;
    return res;
  }

  // Drive remaining artificials out of the basis; drop redundant rows.
  std::vector<int> row_of(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) row_of[static_cast<size_t>(i)] = i;
  for (size_t pos = 0; pos < s.basis.size();) {
    if (s.basis[pos] < n0) {
      ++pos;
      continue;
    }
    Factor f = factor(s);
    Vec ei = Vec::Zero(static_cast<Eigen::Index>(s.basis.size()));
    ei(static_cast<Eigen::Index>(pos)) = 1.0;
    const Vec rowinv = f.lut.solve(ei);
    int swap = -1;
    for (int j = 0; j < n0; ++j) {
      if (std::find(s.basis.begin(), s.basis.end(), j) != s.basis.end()) continue;
      if (std::abs(rowinv.dot(s.M.col(j))) > 1e-7) {
        swap = j;
        break;
      }
    }
    if (swap >= 0) {
      s.basis[pos] = swap;
      ++pos;
      continue;
    }
    // Redundant row: the artificial's own row is implied by the others.
    const int art_row = s.basis[pos] - n0;
    const auto it = std::find(row_of.begin(), row_of.end(), art_row);
    const Eigen::Index phys = static_cast<Eigen::Index>(it - row_of.begin());
    Mat M2(s.M.rows() - 1, s.M.cols());
    Vec rhs2(s.rhs.size() - 1);
    M2 << s.M.topRows(phys), s.M.bottomRows(s.M.rows() - phys - 1);
    rhs2 << s.rhs.head(phys), s.rhs.tail(s.rhs.size() - phys - 1);
    row_of.erase(it);
    s.M = std::move(M2);
    s.rhs = std::move(rhs2);
    s.basis.erase(s.basis.begin() + static_cast<long>(pos));
  }

  // Phase 2.
  Vec cost2 = Vec::Zero(n0 + r);
  cost2.head(n) = c;
  cost2.segment(n, n) = -c;
  for (int j = n0; j < n0 + r; ++j) allowed[static_cast<size_t>(j)] = false;
  const Outcome out = simplex(s, cost2, allowed, entering, direction);
  res.iterations = s.iterations;

  auto collapse = [&](const Vec& full) {
    return Vec(full.head(n) - full.segment(n, n));
  };

  if (out == Outcome::kUnbounded) {
    Vec full = Vec::Zero(n0 + r);
    full(entering) = 1.0;
    for (size_t i = 0; i < s.basis.size(); ++i) full(s.basis[i]) -= direction(static_cast<Eigen::Index>(i));
    Vec ray = collapse(full);
    if (ray.norm() > 0) ray /= ray.norm();
    res.status = LpStatus::kUnbounded;
    res.ray = ray;
    return res;
  }

  Vec full = Vec::Zero(n0 + r);
  Vec y;
  if (!s.basis.empty()) {
    Factor f = factor(s);
    const Vec xb = f.lu.solve(s.rhs);
    for (size_t i = 0; i < s.basis.size(); ++i) full(s.basis[i]) = xb(static_cast<Eigen::Index>(i));
    y = f.lut.solve(basic_costs(s, cost2));
  } else {
    y = Vec(0);
  }
  res.status = LpStatus::kOptimal;
  res.x = collapse(full);
  const double primal = c.dot(res.x);
  const double dual = y.size() ? y.dot(s.rhs) : 0.0;
  if (std::abs(primal - dual) > 1e-8 * (1.0 + std::abs(primal))) {
    throw NumericalError("lp_solve: duality gap check failed on the final basis");
  }
  res.value = sgn * primal;
  res.dual_value = sgn * dual;
  res.dual_ineq = Vec::Zero(k);
  res.dual_eq = Vec::Zero(e);
  for (size_t i = 0; i < row_of.size(); ++i) {
    const int orig = row_of[i];
    const double v = sgn * sigma(orig) * y(static_cast<Eigen::Index>(i));
    if (orig < k) res.dual_ineq(orig) = v;
    else res.dual_eq(orig - k) = v;
  }
  // Primal feasibility of the recovered point.
  double viol = 0.0;
  for (int i = 0; i < k; ++i) viol = std::max(viol, p.A.row(i).dot(res.x) - p.b(i));
  for (int i = 0; i < e; ++i) viol = std::max(viol, std::abs(p.E.row(i).dot(res.x) - p.d(i)));
  if (viol > 1e-7 * scale) throw NumericalError("lp_solve: recovered point violates constraints");
  return res;
}

std::optional<Vec> feasible_point(const Polyhedron& P) {
  LpResult r = lp_solve(LpProblem::over(P, Vec::Zero(P.dim())));
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  return r.x;
}

}  // namespace varcalc
