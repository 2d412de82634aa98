#pragma once

#include <vector>

#include "varcalc/common.hpp"

namespace varcalc {

// {y : A_i y ≤ b_i, or A_i y = b_i for rows flagged as equalities}.
class Polyhedron {
 public:
  Polyhedron() = default;
  Polyhedron(Mat A, Vec b, std::vector<bool> equality = {});

  static Polyhedron whole_space(int dim);
  static Polyhedron nonpositive_orthant(int dim);
  static Polyhedron nonnegative_orthant(int dim);
  static Polyhedron point(const Vec& p);

  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  bool is_equality(int i) const { return eq_[static_cast<size_t>(i)]; }
  const std::vector<bool>& equality_flags() const { return eq_; }

  // Row residual max(A_i y − b_i, 0), or |A_i y − b_i| for equality rows.
  double violation(const Vec& y) const;
  bool contains(const Vec& y, double tol = kFeasTol) const { return violation(y) <= tol; }
  // Rows with |A_i y − b_i| ≤ tol (equality rows always included).
  std::vector<int> active_rows(const Vec& y, double tol = kFeasTol) const;

  Polyhedron intersect(const Polyhedron& other) const;
  Polyhedron with_row(const Vec& a, double beta, bool equality = false) const;
  // Inequality rows split into pairs; convenient for LP construction.
  void split(Mat& A_ineq, Vec& b_ineq, Mat& E, Vec& d) const;

 private:
  Mat A_;
  Vec b_;
  std::vector<bool> eq_;
};

// Polyhedral cone, stored as a Polyhedron whose right-hand side is 0.
class PolyCone {
 public:
  PolyCone() = default;
  explicit PolyCone(Polyhedron p);
  static PolyCone whole_space(int dim) { return PolyCone(Polyhedron::whole_space(dim)); }
  static PolyCone zero(int dim);

  const Polyhedron& polyhedron() const { return p_; }
  int dim() const { return p_.dim(); }
  bool contains(const Vec& u, double tol = kFeasTol) const { return p_.contains(u, tol); }

 private:
  Polyhedron p_;
};

// conv(points) + cone(rays) + span(lines).
struct Generators {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<Vec> rays;
  std::vector<Vec> lines;
  bool empty() const { return points.empty(); }
};

}  // namespace varcalc
