#include "varcalc/problem.hpp"

namespace varcalc {

CompositeProblem::CompositeProblem(std::optional<SmoothOracle> phi, SmoothMap F, GFunction g, Vec x_bar,
                                   std::optional<Vec> v_bar)
    : phi_(std::move(phi)), F_(std::move(F)), g_(std::move(g)), x_bar_(std::move(x_bar)) {
  const int n = F_.dim_in();
  if (phi_) require_dim(phi_->dim(), n, "CompositeProblem: phi");
  require_dim(x_bar_.size(), n, "CompositeProblem: x_bar");
  const int gdim = std::visit([](const auto& gg) { return gg.dim(); }, g_);
  require_dim(gdim, F_.dim_out(), "CompositeProblem: g dimension vs F output");

  F_bar_ = F_.value(x_bar_);
  const ExtReal gv = g_value(F_bar_);
  if (gv.is_infinite()) throw DomainError("CompositeProblem: x_bar is outside dom(g∘F)");
  J_ = F_.jacobian(x_bar_);
  HF_ = F_.hessians(x_bar_);
  grad_phi_ = phi_gradient(x_bar_);
  hess_phi_ = phi_ ? phi_->hessian(x_bar_) : Mat(Mat::Zero(n, n));
  if (v_bar) require_dim(v_bar->size(), n, "CompositeProblem: v_bar");
  v_bar_ = v_bar ? *v_bar : Vec(-grad_phi_);
  f_bar_ = phi_value(x_bar_) + gv.value();
}

const PolyhedralFn& CompositeProblem::polyhedral() const {
  if (!is_polyhedral()) throw DomainError("operation requires a polyhedral g");
  return std::get<PolyhedralFn>(g_);
}

ExtReal CompositeProblem::g_value(const Vec& y, double tol) const {
  if (const auto* pf = std::get_if<PolyhedralFn>(&g_)) return pf->value(y, tol);
  return std::get<BlackBoxFn>(g_).eval(y);
}

ExtReal eval_f(const CompositeProblem& p, const Vec& x, double tol) {
  require_dim(x.size(), p.n(), "eval_f");
  return ExtReal(p.phi_value(x)) + p.g_value(p.F().value(x), tol);
}

}  // namespace varcalc
