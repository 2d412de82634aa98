#include "varcalc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "varcalc/lp.hpp"

namespace varcalc {

namespace {

constexpr double kZeroTol = 1e-10;

// Splits R^cols into the row space of M (range) and its null space, both orthonormal.
void row_null_split(const Mat& M, int cols, Mat& range, Mat& null) {
  if (M.rows() == 0 || cols == 0) {
    range = Mat(cols, 0);
    null = Mat::Identity(cols, cols);
    return;
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * std::max(1.0, smax)) ++rank;
  }
  range = svd.matrixV().leftCols(rank);
  null = svd.matrixV().rightCols(cols - rank);
}

int rank_of(const Mat& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(M);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

struct DdRay {
  Vec v;
  std::vector<int> zero;  // sorted processed rows with M_i v = 0
};

// Extreme rays of the pointed cone {η : M η ≤ 0} where M has full column rank.
std::vector<Vec> pointed_cone_rays(const Mat& M) {
  const int d = static_cast<int>(M.cols());
  if (d == 0) return {};
  const int k = static_cast<int>(M.rows());

  std::vector<int> basis_rows;
  Mat sel(0, d);
  for (int i = 0; i < k && static_cast<int>(basis_rows.size()) < d; ++i) {
    Mat trial(sel.rows() + 1, d);
    trial << sel, M.row(i);
    if (rank_of(trial) > sel.rows()) {
      sel = trial;
      basis_rows.push_back(i);
    }
  }
  if (static_cast<int>(basis_rows.size()) < d) throw NumericalError("double description: cone is not pointed");

  const Mat inv = sel.inverse();
  std::vector<DdRay> rays;
  for (int j = 0; j < d; ++j) {
    DdRay r;
    r.v = -inv.col(j);
    r.v.normalize();
    for (int jj = 0; jj < d; ++jj) {
      if (jj != j) r.zero.push_back(basis_rows[static_cast<size_t>(jj)]);
    }
    std::sort(r.zero.begin(), r.zero.end());
    rays.push_back(std::move(r));
  }
  std::vector<bool> processed(static_cast<size_t>(k), false);
  for (int i : basis_rows) processed[static_cast<size_t>(i)] = true;

  for (int i = 0; i < k; ++i) {
    if (processed[static_cast<size_t>(i)]) continue;
    std::vector<double> val(rays.size());
    for (size_t r = 0; r < rays.size(); ++r) val[r] = M.row(i).dot(rays[r].v);
    std::vector<DdRay> next;
    std::vector<size_t> pos, neg;
    for (size_t r = 0; r < rays.size(); ++r) {
      if (val[r] > kZeroTol) {
        pos.push_back(r);
      } else {
        if (val[r] >= -kZeroTol) {
          rays[r].zero.push_back(i);
          std::sort(rays[r].zero.begin(), rays[r].zero.end());
        } else {
          neg.push_back(r);
        }
        next.push_back(rays[r]);
      }
    }
    for (size_t p : pos) {
      for (size_t q : neg) {
        std::vector<int> common;
        std::set_intersection(rays[p].zero.begin(), rays[p].zero.end(), rays[q].zero.begin(),
                              rays[q].zero.end(), std::back_inserter(common));
        if (static_cast<int>(common.size()) < d - 2) continue;
        Mat sub(static_cast<Eigen::Index>(common.size()), d);
        for (size_t c = 0; c < common.size(); ++c) sub.row(static_cast<Eigen::Index>(c)) = M.row(common[c]);
        if (rank_of(sub) != d - 2) continue;
        DdRay nr;
        nr.v = val[p] * rays[q].v - val[q] * rays[p].v;
        nr.v.normalize();
        nr.zero = common;
        nr.zero.push_back(i);
        std::sort(nr.zero.begin(), nr.zero.end());
        next.push_back(std::move(nr));
      }
    }
    if (next.size() > kMaxEnumRays) throw CapacityError("double description: too many rays");
    rays = std::move(next);
    processed[static_cast<size_t>(i)] = true;
  }

  std::vector<Vec> out;
  for (auto& r : rays) {
    bool dup = false;
    for (const auto& o : out) {
      if ((o - r.v).norm() < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(r.v);
  }
  return out;
}

Mat stack_rows(const std::vector<Vec>& rows, int dim) {
  Mat M(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return M;
}

Mat normalized_rows(const Mat& M) {
  Mat out = M;
  for (int i = 0; i < out.rows(); ++i) {
    const double nr = out.row(i).norm();
    if (nr > 0) out.row(i) /= nr;
  }
  return out;
}

// Rows of a unit-row matrix after restriction to a subspace; rows that vanish there up
// to round-off impose nothing and are dropped before renormalizing.
Mat restricted_rows(const Mat& M) {
  std::vector<Vec> keep;
  for (int i = 0; i < M.rows(); ++i) {
    const double nr = M.row(i).norm();
    if (nr > kZeroTol) keep.push_back(M.row(i).transpose() / nr);
  }
  return stack_rows(keep, static_cast<int>(M.cols()));
}

}  // namespace

ConeGenerators cone_generators(const Mat& ineq, const Mat& eq, int dim) {
  if (dim > kMaxEnumDim + 1) {
    throw CapacityError("vertex enumeration limited to dimension " + std::to_string(kMaxEnumDim));
  }
  Mat N, eq_range;
  row_null_split(eq.rows() ? normalized_rows(eq) : Mat(0, dim), dim, eq_range, N);
  const Mat M = ineq.rows() ? restricted_rows(normalized_rows(ineq) * N) : Mat(0, N.cols());
  Mat W, L;
  row_null_split(M, static_cast<int>(N.cols()), W, L);

  ConeGenerators out;
  const Mat lines = N * L;
  for (int j = 0; j < lines.cols(); ++j) out.lines.push_back(lines.col(j));
  const Mat M2 = restricted_rows(M * W);
  for (const Vec& eta : pointed_cone_rays(M2)) {
    Vec r = N * (W * eta);
    r.normalize();
    out.rays.push_back(r);
  }
  return out;
}

Generators vertex_enumerate(const Polyhedron& P) {
  const int m = P.dim();
  if (m > kMaxEnumDim) throw CapacityError("vertex_enumerate: dimension exceeds " + std::to_string(kMaxEnumDim));
  std::vector<Vec> ineq, eq;
  for (int i = 0; i < P.rows(); ++i) {
    Vec row(m + 1);
    row << P.A().row(i).transpose(), -P.b()(i);
    (P.is_equality(i) ? eq : ineq).push_back(row);
  }
  Vec s_row = Vec::Zero(m + 1);
  s_row(m) = -1.0;
  ineq.push_back(s_row);
  const ConeGenerators cg = cone_generators(stack_rows(ineq, m + 1), stack_rows(eq, m + 1), m + 1);

  Generators G;
  G.dim = m;
  for (const Vec& l : cg.lines) {
    if (std::abs(l(m)) > 1e-9) throw NumericalError("vertex_enumerate: inconsistent lineality");
    G.lines.push_back(l.head(m).normalized());
  }
  for (const Vec& r : cg.rays) {
    if (r(m) > 1e-10) {
      G.points.push_back(r.head(m) / r(m));
    } else {
      G.rays.push_back(r.head(m).normalized());
    }
  }
  if (G.points.empty()) {
    G.rays.clear();
    G.lines.clear();
    return G;
  }
  for (const Vec& v : G.points) {
    if (!P.contains(v, kFeasTol * (1.0 + v.cwiseAbs().maxCoeff()))) {
      throw NumericalError("vertex_enumerate: enumerated vertex fails re-verification");
    }
  }
  return G;
}

Polyhedron hull(const Generators& G) {
  if (G.points.empty()) throw DomainError("hull: no points");
  const int m = G.dim;
  std::vector<Vec> ineq, eq;
  for (const Vec& v : G.points) {
    Vec row(m + 1);
    row << v, -1.0;
    ineq.push_back(row);
  }
  for (const Vec& r : G.rays) {
    Vec row(m + 1);
    row << r, 0.0;
    ineq.push_back(row);
  }
  for (const Vec& l : G.lines) {
    Vec row(m + 1);
    row << l, 0.0;
    eq.push_back(row);
  }
  const ConeGenerators polar = cone_generators(stack_rows(ineq, m + 1), stack_rows(eq, m + 1), m + 1);

  std::vector<Vec> rows;
  std::vector<double> rhs;
  std::vector<bool> flags;
  auto add = [&](const Vec& ab, bool equality) {
    const Vec a = ab.head(m);
    const double na = a.norm();
    if (na < 1e-10) return;
    rows.push_back(a / na);
    rhs.push_back(ab(m) / na);
    flags.push_back(equality);
  };
  for (const Vec& l : polar.lines) add(l, true);
  for (const Vec& r : polar.rays) add(r, false);
  Mat A = stack_rows(rows, m);
  Vec b = Eigen::Map<const Vec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return Polyhedron(std::move(A), std::move(b), std::move(flags));
}

Generators map_generators(const Generators& G, const Mat& M) {
  Generators out;
  out.dim = static_cast<int>(M.rows());
  for (const Vec& p : G.points) out.points.push_back(M * p);
  for (const Vec& r : G.rays) {
    Vec img = M * r;
    if (img.norm() > 1e-12) out.rays.push_back(img);
  }
  for (const Vec& l : G.lines) {
    Vec img = M * l;
    if (img.norm() > 1e-12) out.lines.push_back(img);
  }
  return out;
}

Generators minkowski_sum(const Generators& a, const Generators& b) {
  require_dim(a.dim, b.dim, "minkowski_sum");
  Generators out;
  out.dim = a.dim;
  for (const Vec& p : a.points) {
    for (const Vec& q : b.points) out.points.push_back(p + q);
  }
  out.rays = a.rays;
  out.rays.insert(out.rays.end(), b.rays.begin(), b.rays.end());
  out.lines = a.lines;
  out.lines.insert(out.lines.end(), b.lines.begin(), b.lines.end());
  return out;
}

Projection project_onto_polyhedron(const Polyhedron& P, const Vec& x) {
  require_dim(x.size(), P.dim(), "project_onto_polyhedron");
  const int m = P.dim();
  if (P.rows() == 0) return {x, 0.0};
  if (P.contains(x, 0.0)) return {x, 0.0};
  auto start = feasible_point(P);
  if (!start) throw DomainError("project_onto_polyhedron: polyhedron is empty");
  Vec p = *start;

  std::vector<int> work;
  Mat AW(0, m);
  auto try_add = [&](int i) {
    Mat trial(AW.rows() + 1, m);
    trial << AW, P.A().row(i);
    if (rank_of(trial) > AW.rows()) {
      AW = trial;
      work.push_back(i);
      return true;
    }
    return false;
  };
  for (int i = 0; i < P.rows(); ++i) {
    if (P.is_equality(i)) try_add(i);
  }
  for (int i = 0; i < P.rows(); ++i) {
    if (!P.is_equality(i) && std::abs(P.A().row(i).dot(p) - P.b()(i)) <= kFeasTol) try_add(i);
  }

  // Rows that blocked a step but are dependent on the working set; ignored until a row
  // is dropped.
  std::vector<int> skip;
  // Nearly parallel rows can make the working set zigzag with negligible progress; the
  // iterate stays feasible, so it is returned once 64 iterations gain less than 1e-9.
  double anchor = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 4000; ++iter) {
    if (iter % 64 == 0) {
      const double dist = (x - p).norm();
      if (dist > anchor * (1 - 1e-9)) return {p, dist};
      anchor = dist;
    }
    const Vec g = x - p;
    Vec lambda = Vec::Zero(AW.rows());
    if (AW.rows() > 0) lambda = AW.transpose().completeOrthogonalDecomposition().solve(g);
    const Vec d = g - AW.transpose() * lambda;
    if (d.norm() <= 1e-12 * (1.0 + g.norm())) {
      int drop = -1;
      double most = -1e-12 * (1.0 + g.norm());
      for (size_t j = 0; j < work.size(); ++j) {
        if (P.is_equality(work[j])) continue;
        if (lambda(static_cast<Eigen::Index>(j)) < most) {
          most = lambda(static_cast<Eigen::Index>(j));
          drop = static_cast<int>(j);
        }
      }
      if (drop < 0) return {p, (x - p).norm()};
      work.erase(work.begin() + drop);
      Mat AW2(AW.rows() - 1, m);
      AW2 << AW.topRows(drop), AW.bottomRows(AW.rows() - drop - 1);
      AW = AW2;
      skip.clear();
      continue;
    }
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < P.rows(); ++i) {
      if (P.is_equality(i) || std::find(work.begin(), work.end(), i) != work.end() ||
          std::find(skip.begin(), skip.end(), i) != skip.end()) {
        continue;
      }
      const double ad = P.A().row(i).dot(d);
      if (ad <= 1e-12 * d.norm()) continue;
      const double a_i = std::max(P.b()(i) - P.A().row(i).dot(p), 0.0) / ad;
      if (a_i < alpha) {
        alpha = a_i;
        blocking = i;
      }
    }
    p += alpha * d;
    if (blocking >= 0 && !try_add(blocking)) skip.push_back(blocking);
  }
  throw NumericalError("project_onto_polyhedron: active-set iteration limit");
}

Mat orthonormal_span(const std::vector<Vec>& vectors, int dim) {
  if (vectors.empty()) return Mat(dim, 0);
  Mat V(dim, static_cast<Eigen::Index>(vectors.size()));
  for (size_t i = 0; i < vectors.size(); ++i) V.col(static_cast<Eigen::Index>(i)) = vectors[i];
  Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

ConeFace make_face(const PolyCone& cone) {
  const Polyhedron& P = cone.polyhedron();
  Mat Ai, E;
  Vec bv, dv;
  P.split(Ai, bv, E, dv);
  ConeGenerators g = cone_generators(Ai, E, P.dim());
  ConeFace f{cone, Mat(), g.rays, g.lines};
  std::vector<Vec> all = g.rays;
  all.insert(all.end(), g.lines.begin(), g.lines.end());
  f.basis = orthonormal_span(all, P.dim());
  return f;
}

FaceQuadraticMin min_quadratic_on_cone_face(const Mat& Q, const ConeFace& face, int samples,
                                            std::uint64_t seed) {
  const Mat& B = face.basis;
  const int n = static_cast<int>(Q.rows());
  if (B.cols() == 0) throw DomainError("min_quadratic_on_cone_face: face is {0}");
  if (((B.transpose() * B) - Mat::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() > 1e-8) {
    throw DomainError("min_quadratic_on_cone_face: basis is rank-deficient or not orthonormal");
  }
  const Mat Qs = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(B.transpose() * Qs * B));
  FaceQuadraticMin out;
  out.lower = es.eigenvalues()(0);
  const double tol = 1e-9 * (1.0 + Qs.cwiseAbs().maxCoeff());

  if (face.is_subspace()) {
    out.value = out.lower;
    out.certified = true;
    out.argmin = B * es.eigenvectors().col(0);
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](Vec w) {
    const double nw = w.norm();
    if (nw < 1e-12) return;
    w /= nw;
    if (!face.cone.contains(w, 1e-9)) return;
    const double q = w.dot(Qs * w);
    if (q < best) {
      best = q;
      out.argmin = w;
    }
  };
  for (int j = 0; j < es.eigenvalues().size(); ++j) {
    consider(B * es.eigenvectors().col(j));
    consider(-B * es.eigenvectors().col(j));
  }
  if (best <= out.lower + tol) {
    out.value = out.lower;
    out.certified = true;
    return out;
  }
  for (const Vec& r : face.rays) consider(r);
  if (face.rays.size() == 1 && face.lines.empty()) {
    out.value = best;
    out.lower = best;
    out.certified = true;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec w = Vec::Zero(n);
    for (const Vec& r : face.rays) w += unif(rng) * r;
    for (const Vec& l : face.lines) w += gauss(rng) * l;
    consider(w);
  }
  out.value = best;
  out.certified = false;
  return out;
}

}  // namespace varcalc
