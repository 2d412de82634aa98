#pragma once

#include <optional>
#include <variant>

#include "varcalc/common.hpp"
#include "varcalc/ext_real.hpp"
#include "varcalc/polyhedral_fn.hpp"
#include "varcalc/smooth.hpp"

namespace varcalc {

using GFunction = std::variant<PolyhedralFn, BlackBoxFn>;

// f = φ + g∘F at a base point x̄. Derivative data at x̄ is cached at construction.
class CompositeProblem {
 public:
  // v_bar overrides the default ψ-level subgradient −∇φ(x̄).
  CompositeProblem(std::optional<SmoothOracle> phi, SmoothMap F, GFunction g, Vec x_bar,
                   std::optional<Vec> v_bar = std::nullopt);

  int n() const { return F_.dim_in(); }
  int m() const { return F_.dim_out(); }
  const std::optional<SmoothOracle>& phi() const { return phi_; }
  const SmoothMap& F() const { return F_; }
  const GFunction& g() const { return g_; }
  bool is_polyhedral() const { return std::holds_alternative<PolyhedralFn>(g_); }
  // Throws DomainError for black-box g.
  const PolyhedralFn& polyhedral() const;
  const Vec& x_bar() const { return x_bar_; }

  const Vec& F_bar() const { return F_bar_; }
  const Mat& jacobian() const { return J_; }
  const std::vector<Mat>& F_hessians() const { return HF_; }
  const Vec& grad_phi() const { return grad_phi_; }
  const Mat& hess_phi() const { return hess_phi_; }
  // ψ-level subgradient: −∇φ(x̄) unless overridden.
  const Vec& v_bar() const { return v_bar_; }
  double f_bar() const { return f_bar_; }

  double phi_value(const Vec& x) const { return phi_ ? phi_->value(x) : 0.0; }
  Vec phi_gradient(const Vec& x) const { return phi_ ? phi_->gradient(x) : Vec(Vec::Zero(n())); }
  ExtReal g_value(const Vec& y, double tol = kFeasTol) const;

 private:
  std::optional<SmoothOracle> phi_;
  SmoothMap F_;
  GFunction g_;
  Vec x_bar_;
  Vec F_bar_;
  Mat J_;
  std::vector<Mat> HF_;
  Vec grad_phi_;
  Mat hess_phi_;
  Vec v_bar_;
  double f_bar_ = 0;
};

// φ(x) + g(F(x)); `tol` is the indicator membership tolerance.
ExtReal eval_f(const CompositeProblem& p, const Vec& x, double tol = kFeasTol);

}  // namespace varcalc
