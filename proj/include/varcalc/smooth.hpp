#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/expr.hpp"

namespace varcalc {

struct FdSteps {
  double grad_rel = 1e-6;  // central-difference gradient step, relative to max(1, ‖x‖)
  double hess_rel = 1e-4;  // central differences of the gradient
};

// Scalar function on R^n with optional exact gradient and Hessian.
// Missing derivatives fall back to central differences.
class SmoothOracle {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  SmoothOracle(int dim, ValueFn value, GradFn grad = {}, HessFn hess = {},
               bool extended_hessian = false, FdSteps steps = {});

  // Symbolic gradient and Hessian are precomputed from the tree.
  static SmoothOracle from_expr(const Expr& e, int dim);
  static SmoothOracle constant(int dim, double c);
  // x ↦ ½ xᵀQx + ⟨c, x⟩
  static SmoothOracle quadratic(const Mat& Q, const Vec& c);
  static SmoothOracle linear(const Vec& a, double offset = 0.0);

  int dim() const { return dim_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }
  // Marks that hessian() is only an extended-sense Hessian at the base point.
  bool extended_hessian() const { return extended_; }
  const FdSteps& fd_steps() const { return steps_; }
  SmoothOracle with_fd_steps(FdSteps s) const;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  // Always exactly symmetric.
  Mat hessian(const Vec& x) const;

 private:
  int dim_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  bool extended_;
  FdSteps steps_;
};

// F : R^n → R^m as a stack of scalar oracles.
class SmoothMap {
 public:
  SmoothMap(int dim_in, std::vector<SmoothOracle> components);
  static SmoothMap identity(int n);
  static SmoothMap from_exprs(const std::vector<Expr>& exprs, int dim_in);

  int dim_in() const { return n_; }
  int dim_out() const { return static_cast<int>(comps_.size()); }
  const SmoothOracle& component(int k) const { return comps_[static_cast<size_t>(k)]; }
  SmoothMap with_fd_steps(FdSteps s) const;

  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  std::vector<Mat> hessians(const Vec& x) const;

 private:
  int n_;
  std::vector<SmoothOracle> comps_;
};

// m-vector of ⟨H_k w, w⟩.
Vec second_order_term(const std::vector<Mat>& hessians, const Vec& w);

// ‖∇o(x) − ∇o(x̄) − A(x − x̄)‖ / ‖x − x̄‖ per sample.
std::vector<double> extended_hessian_residual(const SmoothOracle& o, const Vec& x_bar,
                                              const Mat& A, const std::vector<Vec>& samples);

}  // namespace varcalc
