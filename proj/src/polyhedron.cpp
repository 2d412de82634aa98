#include "varcalc/polyhedron.hpp"

#include <cmath>

namespace varcalc {

Polyhedron::Polyhedron(Mat A, Vec b, std::vector<bool> equality)
    : A_(std::move(A)), b_(std::move(b)), eq_(std::move(equality)) {
  require_dim(b_.size(), A_.rows(), "Polyhedron: b");
  if (eq_.empty()) eq_.assign(static_cast<size_t>(A_.rows()), false);
  require_dim(static_cast<long>(eq_.size()), A_.rows(), "Polyhedron: equality flags");
}

Polyhedron Polyhedron::whole_space(int dim) { return Polyhedron(Mat(0, dim), Vec(0)); }
Polyhedron Polyhedron::nonpositive_orthant(int dim) {
  return Polyhedron(Mat::Identity(dim, dim), Vec::Zero(dim));
}
Polyhedron Polyhedron::nonnegative_orthant(int dim) {
  return Polyhedron(-Mat::Identity(dim, dim), Vec::Zero(dim));
}
Polyhedron Polyhedron::point(const Vec& p) {
  const int m = static_cast<int>(p.size());
  return Polyhedron(Mat::Identity(m, m), p, std::vector<bool>(static_cast<size_t>(m), true));
}

double Polyhedron::violation(const Vec& y) const {
  require_dim(y.size(), dim(), "Polyhedron: point");
  double worst = 0.0;
  for (int i = 0; i < rows(); ++i) {
    const double r = A_.row(i).dot(y) - b_(i);
    worst = std::max(worst, eq_[static_cast<size_t>(i)] ? std::abs(r) : r);
  }
  return worst;
}

std::vector<int> Polyhedron::active_rows(const Vec& y, double tol) const {
  std::vector<int> out;
  for (int i = 0; i < rows(); ++i) {
    if (eq_[static_cast<size_t>(i)] || std::abs(A_.row(i).dot(y) - b_(i)) <= tol) out.push_back(i);
  }
  return out;
}

Polyhedron Polyhedron::intersect(const Polyhedron& o) const {
  require_dim(o.dim(), dim(), "Polyhedron::intersect");
  Mat A(rows() + o.rows(), dim());
  A << A_, o.A_;
  Vec b(rows() + o.rows());
  b << b_, o.b_;
  std::vector<bool> eq = eq_;
  eq.insert(eq.end(), o.eq_.begin(), o.eq_.end());
  return Polyhedron(std::move(A), std::move(b), std::move(eq));
}

Polyhedron Polyhedron::with_row(const Vec& a, double beta, bool equality) const {
  Mat A(1, dim());
  A.row(0) = a.transpose();
  return intersect(Polyhedron(A, Vec::Constant(1, beta), {equality}));
}

void Polyhedron::split(Mat& A_ineq, Vec& b_ineq, Mat& E, Vec& d) const {
  int ni = 0, ne = 0;
  for (bool e : eq_) (e ? ne : ni)++;
  A_ineq.resize(ni, dim());
  b_ineq.resize(ni);
  E.resize(ne, dim());
  d.resize(ne);
  int i_i = 0, i_e = 0;
  for (int i = 0; i < rows(); ++i) {
    if (eq_[static_cast<size_t>(i)]) {
      E.row(i_e) = A_.row(i);
      d(i_e++) = b_(i);
    } else {
      A_ineq.row(i_i) = A_.row(i);
      b_ineq(i_i++) = b_(i);
    }
  }
}

PolyCone::PolyCone(Polyhedron p) : p_(std::move(p)) {
  if (p_.rows() > 0 && p_.b().cwiseAbs().maxCoeff() != 0.0) {
    throw DomainError("PolyCone: right-hand side must be zero");
  }
}

PolyCone PolyCone::zero(int dim) {
  return PolyCone(Polyhedron(Mat::Identity(dim, dim), Vec::Zero(dim),
                             std::vector<bool>(static_cast<size_t>(dim), true)));
}

}  // namespace varcalc
