#include "varcalc/smooth.hpp"

#include <algorithm>
#include <span>

namespace varcalc {

namespace {
std::span<const double> as_span(const Vec& x) {
  return {x.data(), static_cast<size_t>(x.size())};
}
double step_scale(const Vec& x) { return std::max(1.0, x.norm()); }
}  // namespace

SmoothOracle::SmoothOracle(int dim, ValueFn value, GradFn grad, HessFn hess,
                           bool extended_hessian, FdSteps steps)
    : dim_(dim),
      value_(std::move(value)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      extended_(extended_hessian),
      steps_(steps) {
  if (dim <= 0) throw DimensionError("SmoothOracle: dimension must be positive");
  if (!value_) throw Error("SmoothOracle: value function required");
}

SmoothOracle SmoothOracle::from_expr(const Expr& e, int dim) {
  if (e.max_variable() >= dim) throw DimensionError("SmoothOracle: expression uses too many variables");
  auto grads = std::make_shared<std::vector<Expr>>();
  auto hess = std::make_shared<std::vector<Expr>>();
  for (int i = 0; i < dim; ++i) grads->push_back(e.derivative(i));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) hess->push_back((*grads)[static_cast<size_t>(i)].derivative(j));
  }
  return SmoothOracle(
      dim, [e](const Vec& x) { return e.eval(as_span(x)); },
      [grads](const Vec& x) {
        Vec g(static_cast<Eigen::Index>(grads->size()));
        for (size_t i = 0; i < grads->size(); ++i) g(static_cast<Eigen::Index>(i)) = (*grads)[i].eval(as_span(x));
        return g;
      },
      [hess, dim](const Vec& x) {
        Mat H(dim, dim);
        size_t k = 0;
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j <= i; ++j) H(i, j) = H(j, i) = (*hess)[k++].eval(as_span(x));
        }
        return H;
      });
}

SmoothOracle SmoothOracle::constant(int dim, double c) {
  return SmoothOracle(
      dim, [c](const Vec&) { return c; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
      [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
}

SmoothOracle SmoothOracle::quadratic(const Mat& Q, const Vec& c) {
  Mat Qs = 0.5 * (Q + Q.transpose());
  return SmoothOracle(
      static_cast<int>(c.size()), [Qs, c](const Vec& x) { return 0.5 * x.dot(Qs * x) + c.dot(x); },
      [Qs, c](const Vec& x) { return Vec(Qs * x + c); }, [Qs](const Vec&) { return Qs; });
}

SmoothOracle SmoothOracle::linear(const Vec& a, double offset) {
  const int n = static_cast<int>(a.size());
  return SmoothOracle(
      n, [a, offset](const Vec& x) { return a.dot(x) + offset; }, [a](const Vec&) { return a; },
      [n](const Vec&) { return Mat(Mat::Zero(n, n)); });
}

SmoothOracle SmoothOracle::with_fd_steps(FdSteps s) const {
  SmoothOracle o = *this;
  o.steps_ = s;
  return o;
}

double SmoothOracle::value(const Vec& x) const {
  require_dim(x.size(), dim_, "SmoothOracle::value");
  return value_(x);
}

Vec SmoothOracle::gradient(const Vec& x) const {
  require_dim(x.size(), dim_, "SmoothOracle::gradient");
  if (grad_) return grad_(x);
  const double h = steps_.grad_rel * step_scale(x);
  Vec g(dim_);
  Vec xp = x, xm = x;
  for (int i = 0; i < dim_; ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (value_(xp) - value_(xm)) / (2 * h);
    xp(i) = xm(i) = x(i);
  }
  return g;
}

Mat SmoothOracle::hessian(const Vec& x) const {
  require_dim(x.size(), dim_, "SmoothOracle::hessian");
  Mat H;
  if (hess_) {
    H = hess_(x);
  } else {
    const double h = steps_.hess_rel * step_scale(x);
    H.resize(dim_, dim_);
    Vec xp = x, xm = x;
    for (int i = 0; i < dim_; ++i) {
      xp(i) = x(i) + h;
      xm(i) = x(i) - h;
      H.col(i) = (gradient(xp) - gradient(xm)) / (2 * h);
      xp(i) = xm(i) = x(i);
    }
  }
  return 0.5 * (H + H.transpose());
}

SmoothMap::SmoothMap(int dim_in, std::vector<SmoothOracle> components)
    : n_(dim_in), comps_(std::move(components)) {
  for (const auto& c : comps_) require_dim(c.dim(), n_, "SmoothMap component");
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<SmoothOracle> comps;
  for (int k = 0; k < n; ++k) comps.push_back(SmoothOracle::linear(Vec::Unit(n, k)));
  return SmoothMap(n, std::move(comps));
}

SmoothMap SmoothMap::from_exprs(const std::vector<Expr>& exprs, int dim_in) {
  std::vector<SmoothOracle> comps;
  for (const auto& e : exprs) comps.push_back(SmoothOracle::from_expr(e, dim_in));
  return SmoothMap(dim_in, std::move(comps));
}

SmoothMap SmoothMap::with_fd_steps(FdSteps s) const {
  std::vector<SmoothOracle> comps;
  for (const auto& c : comps_) comps.push_back(c.with_fd_steps(s));
  return SmoothMap(n_, std::move(comps));
}

Vec SmoothMap::value(const Vec& x) const {
  Vec y(dim_out());
  for (int k = 0; k < dim_out(); ++k) y(k) = component(k).value(x);
  return y;
}

Mat SmoothMap::jacobian(const Vec& x) const {
  Mat J(dim_out(), n_);
  for (int k = 0; k < dim_out(); ++k) J.row(k) = component(k).gradient(x).transpose();
  return J;
}

std::vector<Mat> SmoothMap::hessians(const Vec& x) const {
  std::vector<Mat> out;
  for (const auto& c : comps_) out.push_back(c.hessian(x));
  return out;
}

Vec second_order_term(const std::vector<Mat>& hessians, const Vec& w) {
  Vec q(static_cast<Eigen::Index>(hessians.size()));
  for (size_t k = 0; k < hessians.size(); ++k) q(static_cast<Eigen::Index>(k)) = w.dot(hessians[k] * w);
  return q;
}

std::vector<double> extended_hessian_residual(const SmoothOracle& o, const Vec& x_bar,
                                              const Mat& A, const std::vector<Vec>& samples) {
  require_dim(A.rows(), o.dim(), "extended_hessian_residual: A");
  require_dim(A.cols(), o.dim(), "extended_hessian_residual: A");
  const Vec g_bar = o.gradient(x_bar);
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& x : samples) {
    const Vec d = x - x_bar;
    const double nd = d.norm();
    if (nd == 0.0) throw DomainError("extended_hessian_residual: sample equals the base point");
    out.push_back((o.gradient(x) - g_bar - A * d).norm() / nd);
  }
  return out;
}

}  // namespace varcalc
