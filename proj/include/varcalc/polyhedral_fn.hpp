#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/ext_real.hpp"
#include "varcalc/lp.hpp"
#include "varcalc/polyhedron.hpp"

namespace varcalc {

// Polyhedral convex function from a fixed catalog, closed under finite sums.
class PolyhedralFn {
 public:
  struct Indicator {
    Polyhedron set;
  };
  struct MaxAffine {  // max_i ⟨a_i, y⟩ + β_i, rows of `slopes`
    Mat slopes;
    Vec offsets;
  };
  struct L1Norm {  // Σ_{c ∈ coords} |y_c|
    int dim;
    std::vector<int> coords;
  };
  struct LinfNorm {
    int dim;
  };
  struct Affine {
    Vec slope;
    double offset;
  };
  struct Sum {
    std::vector<PolyhedralFn> terms;
  };
  using Variant = std::variant<Indicator, MaxAffine, L1Norm, LinfNorm, Affine, Sum>;

  static PolyhedralFn indicator(Polyhedron P);
  static PolyhedralFn max_affine(Mat slopes, Vec offsets);
  static PolyhedralFn l1(int dim);
  static PolyhedralFn l1_on(int dim, std::vector<int> coords);
  static PolyhedralFn linf(int dim);
  static PolyhedralFn affine(Vec slope, double offset = 0.0);
  static PolyhedralFn zero(int dim) { return affine(Vec::Zero(dim), 0.0); }
  static PolyhedralFn sum(std::vector<PolyhedralFn> terms);

  int dim() const { return dim_; }
  // Lipschitz constant relative to the domain.
  double lipschitz() const { return lipschitz_; }
  const Variant& variant() const { return v_; }
  std::string kind() const;
  std::string describe() const;

  // Indicators accept points within `tol` of the set.
  ExtReal value(const Vec& y, double tol = kFeasTol) const;
  // h = dg(y)(·), itself a positively homogeneous member of the catalog.
  PolyhedralFn directional(const Vec& y) const;
  // V-representation of ∂g(y); `tol` decides which pieces count as active.
  Generators subgradients(const Vec& y, double tol = kFeasTol) const;
  // dom g as a polyhedron (whole space when g is finite everywhere).
  Polyhedron domain() const;
  bool has_indicator() const;

 private:
  PolyhedralFn(int dim, double lip, Variant v) : dim_(dim), lipschitz_(lip), v_(std::move(v)) {}
  int dim_;
  double lipschitz_;
  Variant v_;
};

// Opaque g usable only by the estimators.
struct BlackBoxFn {
  int m;
  std::function<ExtReal(const Vec&)> eval;
  int dim() const { return m; }
};

// ---- LP encoding of epigraphs -------------------------------------------------

struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;
  LinExpr& add(int var, double coef) {
    if (coef != 0.0) terms.emplace_back(var, coef);
    return *this;
  }
  LinExpr& add(const LinExpr& o, double scale = 1.0);
};

class LpBuilder {
 public:
  int add_var() { return nvars_++; }
  int num_vars() const { return nvars_; }
  void add_le(const LinExpr& e, double rhs = 0.0) { le_.push_back({e, rhs}); }
  void add_eq(const LinExpr& e, double rhs = 0.0) { eq_.push_back({e, rhs}); }
  LpProblem build(const LinExpr& objective, LpSense sense) const;

 private:
  int nvars_ = 0;
  std::vector<std::pair<LinExpr, double>> le_;
  std::vector<std::pair<LinExpr, double>> eq_;
};

// Adds constraints so that minimizing the returned expression over the LP minimizes
// g(arg). `arg` lists one affine expression per coordinate of g's argument.
LinExpr encode_epigraph(const PolyhedralFn& g, const std::vector<LinExpr>& arg, LpBuilder& lp);

// inf_z g(z) − ⟨c, z⟩ solved by LP; +inf-free: returns nullopt when unbounded below,
// ExtReal +inf when infeasible.
std::optional<ExtReal> minimize_minus_linear(const PolyhedralFn& g, const Vec& c);

// ---- calculus for polyhedral g -------------------------------------------------

bool is_subgradient(const PolyhedralFn& g, const Vec& y, const Vec& v);
Polyhedron g_subdifferential(const PolyhedralFn& g, const Vec& y);
ExtReal g_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& u);
ExtReal g_second_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& v, const Vec& u);
ExtReal g_parabolic_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& u, const Vec& z);

struct ConjugateCheck {
  ExtReal lhs;
  ExtReal rhs;
};
ConjugateCheck g_parabolic_conjugate_check(const PolyhedralFn& g, const Vec& y, const Vec& u,
                                           const Vec& v);

// g*(y) in closed form per variant; sums go through the generic LP.
ExtReal g_conjugate(const PolyhedralFn& g, const Vec& y);
// sup_x ⟨y, x⟩ − g(x) through the generic epigraph LP.
ExtReal g_conjugate_lp(const PolyhedralFn& g, const Vec& y);

PolyCone tangent_cone(const Polyhedron& P, const Vec& y);
Polyhedron second_order_tangent_set(const Polyhedron& P, const Vec& y, const Vec& u);

}  // namespace varcalc
