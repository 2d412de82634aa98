#include "varcalc/polyhedral_fn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varcalc/geometry.hpp"

namespace varcalc {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const PolyhedralFn& g, const Vec& y, const char* who) {
  require_dim(y.size(), g.dim(), who);
  if (g.value(y).is_infinite()) throw DomainError(std::string(who) + ": point outside dom g");
}
}  // namespace

PolyhedralFn PolyhedralFn::indicator(Polyhedron P) {
  const int m = P.dim();
  return PolyhedralFn(m, 0.0, Indicator{std::move(P)});
}

PolyhedralFn PolyhedralFn::max_affine(Mat slopes, Vec offsets) {
  require_dim(offsets.size(), slopes.rows(), "max_affine: offsets");
  if (slopes.rows() == 0) throw DomainError("max_affine: needs at least one piece");
  double lip = 0.0;
  for (int i = 0; i < slopes.rows(); ++i) lip = std::max(lip, slopes.row(i).norm());
  const int m = static_cast<int>(slopes.cols());
  return PolyhedralFn(m, lip, MaxAffine{std::move(slopes), std::move(offsets)});
}

PolyhedralFn PolyhedralFn::l1(int dim) {
  std::vector<int> all(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) all[static_cast<size_t>(i)] = i;
  return l1_on(dim, std::move(all));
}

PolyhedralFn PolyhedralFn::l1_on(int dim, std::vector<int> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  for (int c : coords) {
    if (c < 0 || c >= dim) throw DimensionError("l1: coordinate out of range");
  }
  const double lip = std::sqrt(static_cast<double>(coords.size()));
  return PolyhedralFn(dim, lip, L1Norm{dim, std::move(coords)});
}

PolyhedralFn PolyhedralFn::linf(int dim) { return PolyhedralFn(dim, 1.0, LinfNorm{dim}); }

PolyhedralFn PolyhedralFn::affine(Vec slope, double offset) {
  const int m = static_cast<int>(slope.size());
  const double lip = slope.norm();
  return PolyhedralFn(m, lip, Affine{std::move(slope), offset});
}

PolyhedralFn PolyhedralFn::sum(std::vector<PolyhedralFn> terms) {
  if (terms.empty()) throw DomainError("sum: needs at least one term");
  const int m = terms.front().dim();
  double lip = 0.0;
  for (const auto& t : terms) {
    require_dim(t.dim(), m, "sum: term dimension");
    lip += t.lipschitz();
  }
  return PolyhedralFn(m, lip, Sum{std::move(terms)});
}

std::string PolyhedralFn::kind() const {
  return std::visit(overloaded{[](const Indicator&) { return "indicator"; },
                               [](const MaxAffine&) { return "max_affine"; },
                               [](const L1Norm&) { return "l1"; },
                               [](const LinfNorm&) { return "linf"; },
                               [](const Affine&) { return "affine"; },
                               [](const Sum&) { return "sum"; }},
                    v_);
}

std::string PolyhedralFn::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Indicator& s) { os << "indicator of " << s.set.rows() << "-row polyhedron"; },
                 [&](const MaxAffine& s) { os << "max of " << s.slopes.rows() << " affine pieces"; },
                 [&](const L1Norm& s) { os << "l1 norm on " << s.coords.size() << " coordinate(s)"; },
                 [&](const LinfNorm&) { os << "linf norm"; },
                 [&](const Affine&) { os << "affine"; },
                 [&](const Sum& s) {
                   os << "sum(";
                   for (size_t i = 0; i < s.terms.size(); ++i) os << (i ? ", " : "") << s.terms[i].describe();
                   os << ")";
                 }},
             v_);
  os << " on R^" << dim_;
  return os.str();
}

ExtReal PolyhedralFn::value(const Vec& y, double tol) const {
  require_dim(y.size(), dim_, "PolyhedralFn::value");
  return std::visit(
      overloaded{[&](const Indicator& s) { return s.set.contains(y, tol) ? ExtReal(0.0) : ExtReal::infinity(); },
                 [&](const MaxAffine& s) { return ExtReal((s.slopes * y + s.offsets).maxCoeff()); },
                 [&](const L1Norm& s) {
                   double t = 0.0;
                   for (int c : s.coords) t += std::abs(y(c));
                   return ExtReal(t);
                 },
                 [&](const LinfNorm&) { return ExtReal(dim_ ? y.cwiseAbs().maxCoeff() : 0.0); },
                 [&](const Affine& s) { return ExtReal(s.slope.dot(y) + s.offset); },
                 [&](const Sum& s) {
                   ExtReal t(0.0);
                   for (const auto& term : s.terms) t += term.value(y, tol);
                   return t;
                 }},
      v_);
}

PolyhedralFn PolyhedralFn::directional(const Vec& y) const {
  check_finite(*this, y, "PolyhedralFn::directional");
  return std::visit(
      overloaded{
          [&](const Indicator& s) {
            const std::vector<int> act = s.set.active_rows(y);
            Mat A(static_cast<Eigen::Index>(act.size()), dim_);
            std::vector<bool> eq;
            for (size_t i = 0; i < act.size(); ++i) {
              A.row(static_cast<Eigen::Index>(i)) = s.set.A().row(act[i]);
              eq.push_back(s.set.is_equality(act[i]));
            }
            return indicator(Polyhedron(A, Vec::Zero(static_cast<Eigen::Index>(act.size())), eq));
          },
          [&](const MaxAffine& s) {
            const Vec vals = s.slopes * y + s.offsets;
            const double top = vals.maxCoeff();
            std::vector<int> act;
            for (int i = 0; i < vals.size(); ++i) {
              if (vals(i) >= top - kFeasTol) act.push_back(i);
            }
            Mat A(static_cast<Eigen::Index>(act.size()), dim_);
            for (size_t i = 0; i < act.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = s.slopes.row(act[i]);
            return max_affine(A, Vec::Zero(static_cast<Eigen::Index>(act.size())));
          },
          [&](const L1Norm& s) {
            Vec a = Vec::Zero(dim_);
            std::vector<int> zero;
            for (int c : s.coords) {
              if (std::abs(y(c)) > kFeasTol) a(c) = y(c) > 0 ? 1.0 : -1.0;
              else zero.push_back(c);
            }
            if (zero.empty()) return affine(a, 0.0);
            if (a.isZero()) return l1_on(dim_, zero);
            return sum({affine(a, 0.0), l1_on(dim_, zero)});
          },
          [&](const LinfNorm&) {
            const double top = dim_ ? y.cwiseAbs().maxCoeff() : 0.0;
            if (top <= kFeasTol) return linf(dim_);
            std::vector<Vec> rows;
            for (int i = 0; i < dim_; ++i) {
              if (std::abs(y(i)) >= top - kFeasTol) rows.push_back((y(i) > 0 ? 1.0 : -1.0) * Vec::Unit(dim_, i));
            }
            Mat A(static_cast<Eigen::Index>(rows.size()), dim_);
            for (size_t i = 0; i < rows.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
            return max_affine(A, Vec::Zero(static_cast<Eigen::Index>(rows.size())));
          },
          [&](const Affine& s) { return affine(s.slope, 0.0); },
          [&](const Sum& s) {
            std::vector<PolyhedralFn> parts;
            for (const auto& t : s.terms) parts.push_back(t.directional(y));
            return sum(std::move(parts));
          }},
      v_);
}

Generators PolyhedralFn::subgradients(const Vec& y, double tol) const {
  require_dim(y.size(), dim_, "PolyhedralFn::subgradients");
  if (value(y, std::max(tol, 0.0)).is_infinite()) throw DomainError("PolyhedralFn::subgradients: point outside dom g");
  Generators G;
  G.dim = dim_;
  std::visit(
      overloaded{
          [&](const Indicator& s) {
            G.points.push_back(Vec::Zero(dim_));
            for (int i : s.set.active_rows(y, tol)) {
              (s.set.is_equality(i) ? G.lines : G.rays).push_back(s.set.A().row(i).transpose());
            }
          },
          [&](const MaxAffine& s) {
            const Vec vals = s.slopes * y + s.offsets;
            const double top = vals.maxCoeff();
            for (int i = 0; i < vals.size(); ++i) {
              if (vals(i) >= top - tol) G.points.push_back(s.slopes.row(i).transpose());
            }
          },
          [&](const L1Norm& s) {
            Vec base = Vec::Zero(dim_);
            std::vector<int> zero;
            for (int c : s.coords) {
              if (std::abs(y(c)) > tol) base(c) = y(c) > 0 ? 1.0 : -1.0;
              else zero.push_back(c);
            }
            if (zero.size() > 12) throw CapacityError("l1 subgradients: too many zero coordinates");
            for (size_t mask = 0; mask < (size_t{1} << zero.size()); ++mask) {
              Vec p = base;
              for (size_t k = 0; k < zero.size(); ++k) p(zero[k]) = (mask >> k) & 1 ? 1.0 : -1.0;
              G.points.push_back(p);
            }
          },
          [&](const LinfNorm&) {
            const double top = dim_ ? y.cwiseAbs().maxCoeff() : 0.0;
            for (int i = 0; i < dim_; ++i) {
              if (top <= tol) {
                G.points.push_back(Vec::Unit(dim_, i));
                G.points.push_back(-Vec::Unit(dim_, i));
              } else if (std::abs(y(i)) >= top - tol) {
                G.points.push_back((y(i) > 0 ? 1.0 : -1.0) * Vec::Unit(dim_, i));
              }
            }
          },
          [&](const Affine& s) { G.points.push_back(s.slope); },
          [&](const Sum& s) {
            G = s.terms.front().subgradients(y, tol);
            for (size_t i = 1; i < s.terms.size(); ++i) {
              G = minkowski_sum(G, s.terms[i].subgradients(y, tol));
              if (G.points.size() > kMaxEnumRays) throw CapacityError("sum subgradients: too many points");
            }
          }},
      v_);
  return G;
}

Polyhedron PolyhedralFn::domain() const {
  return std::visit(overloaded{[&](const Indicator& s) { return s.set; },
                               [&](const Sum& s) {
                                 Polyhedron P = Polyhedron::whole_space(dim_);
                                 for (const auto& t : s.terms) P = P.intersect(t.domain());
                                 return P;
                               },
                               [&](const auto&) { return Polyhedron::whole_space(dim_); }},
                    v_);
}

bool PolyhedralFn::has_indicator() const {
  return std::visit(overloaded{[](const Indicator&) { return true; },
                               [](const Sum& s) {
                                 return std::any_of(s.terms.begin(), s.terms.end(),
                                                    [](const PolyhedralFn& t) { return t.has_indicator(); });
                               },
                               [](const auto&) { return false; }},
                    v_);
}

LinExpr& LinExpr::add(const LinExpr& o, double scale) {
  for (const auto& [v, c] : o.terms) add(v, scale * c);
  constant += scale * o.constant;
  return *this;
}

LpProblem LpBuilder::build(const LinExpr& objective, LpSense sense) const {
  LpProblem p;
  p.sense = sense;
  p.c = Vec::Zero(nvars_);
  for (const auto& [v, c] : objective.terms) p.c(v) += c;
  auto fill = [&](const std::vector<std::pair<LinExpr, double>>& rows, Mat& M, Vec& rhs) {
    M = Mat::Zero(static_cast<Eigen::Index>(rows.size()), nvars_);
    rhs = Vec(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (const auto& [v, c] : rows[i].first.terms) M(ii, v) += c;
      rhs(ii) = rows[i].second - rows[i].first.constant;
    }
  };
  fill(le_, p.A, p.b);
  fill(eq_, p.E, p.d);
  return p;
}

LinExpr encode_epigraph(const PolyhedralFn& g, const std::vector<LinExpr>& arg, LpBuilder& lp) {
  require_dim(static_cast<long>(arg.size()), g.dim(), "encode_epigraph: argument");
  auto dot = [&](const auto& row) {
    LinExpr e;
    for (int k = 0; k < g.dim(); ++k) e.add(arg[static_cast<size_t>(k)], row(k));
    return e;
  };
  using PF = PolyhedralFn;
  return std::visit(
      overloaded{
          [&](const PF::Indicator& s) {
            for (int i = 0; i < s.set.rows(); ++i) {
              LinExpr e = dot(s.set.A().row(i));
              if (s.set.is_equality(i)) lp.add_eq(e, s.set.b()(i));
              else lp.add_le(e, s.set.b()(i));
            }
            return LinExpr{};
          },
          [&](const PF::MaxAffine& s) {
            const int t = lp.add_var();
            for (int i = 0; i < s.slopes.rows(); ++i) {
              LinExpr e = dot(s.slopes.row(i));
              e.constant += s.offsets(i);
              e.add(t, -1.0);
              lp.add_le(e);
            }
            LinExpr out;
            out.add(t, 1.0);
            return out;
          },
          [&](const PF::L1Norm& s) {
            LinExpr out;
            for (int c : s.coords) {
              const int sc = lp.add_var();
              LinExpr up = arg[static_cast<size_t>(c)];
              up.add(sc, -1.0);
              lp.add_le(up);
              LinExpr dn;
              dn.add(arg[static_cast<size_t>(c)], -1.0);
              dn.add(sc, -1.0);
              lp.add_le(dn);
              out.add(sc, 1.0);
            }
            return out;
          },
          [&](const PF::LinfNorm&) {
            const int t = lp.add_var();
            for (int k = 0; k < g.dim(); ++k) {
              LinExpr up = arg[static_cast<size_t>(k)];
              up.add(t, -1.0);
              lp.add_le(up);
              LinExpr dn;
              dn.add(arg[static_cast<size_t>(k)], -1.0);
              dn.add(t, -1.0);
              lp.add_le(dn);
            }
            LinExpr out;
            out.add(t, 1.0);
            if (g.dim() == 0) lp.add_le(LinExpr().add(t, -1.0));
            return out;
          },
          [&](const PF::Affine& s) {
            LinExpr e = dot(s.slope);
            e.constant += s.offset;
            return e;
          },
          [&](const PF::Sum& s) {
            LinExpr out;
            for (const auto& term : s.terms) out.add(encode_epigraph(term, arg, lp));
            return out;
          }},
      g.variant());
}

std::optional<ExtReal> minimize_minus_linear(const PolyhedralFn& g, const Vec& c) {
  require_dim(c.size(), g.dim(), "minimize_minus_linear");
  LpBuilder lp;
  std::vector<LinExpr> arg;
  LinExpr obj;
  for (int k = 0; k < g.dim(); ++k) {
    const int v = lp.add_var();
    arg.push_back(LinExpr().add(v, 1.0));
    obj.add(v, -c(k));
  }
  obj.add(encode_epigraph(g, arg, lp));
  const LpResult r = lp_solve(lp.build(obj, LpSense::kMin));
  if (r.status == LpStatus::kUnbounded) return std::nullopt;
  if (r.status == LpStatus::kInfeasible) return ExtReal::infinity();
  return ExtReal(r.value + obj.constant);
}

bool is_subgradient(const PolyhedralFn& g, const Vec& y, const Vec& v) {
  require_dim(v.size(), g.dim(), "is_subgradient");
  // v ∈ ∂g(y) iff dg(y)(u) − ⟨v,u⟩ ≥ 0 for all u; the LP is 0 or unbounded.
  const auto r = minimize_minus_linear(g.directional(y), v);
  return r.has_value();
}

Polyhedron g_subdifferential(const PolyhedralFn& g, const Vec& y) { return hull(g.subgradients(y)); }

ExtReal g_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& u) {
  require_dim(u.size(), g.dim(), "g_subderivative: direction");
  return g.directional(y).value(u);
}

ExtReal g_second_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& v, const Vec& u) {
  require_dim(u.size(), g.dim(), "g_second_subderivative: direction");
  if (!is_subgradient(g, y, v)) throw DomainError("g_second_subderivative: v is not a subgradient at y");
  const ExtReal d = g_subderivative(g, y, u);
  if (d.is_infinite()) return ExtReal::infinity();
  const double tol = kFeasTol * (1.0 + u.norm() * (1.0 + v.norm()));
  return std::abs(d.value() - v.dot(u)) <= tol ? ExtReal(0.0) : ExtReal::infinity();
}

ExtReal g_parabolic_subderivative(const PolyhedralFn& g, const Vec& y, const Vec& u, const Vec& z) {
  require_dim(z.size(), g.dim(), "g_parabolic_subderivative: z");
  const PolyhedralFn h = g.directional(y);
  if (h.value(u).is_infinite()) throw DomainError("g_parabolic_subderivative: dg(y)(u) = +inf");
  return h.directional(u).value(z);
}

ConjugateCheck g_parabolic_conjugate_check(const PolyhedralFn& g, const Vec& y, const Vec& u,
                                           const Vec& v) {
  require_dim(v.size(), g.dim(), "g_parabolic_conjugate_check: v");
  const PolyhedralFn h = g.directional(y);
  const ExtReal du = h.value(u);
  if (du.is_infinite()) throw DomainError("g_parabolic_conjugate_check: dg(y)(u) = +inf");
  const PolyhedralFn h2 = h.directional(u);
  ConjugateCheck out;
  // (h2)*(v) = −inf_z (h2(z) − ⟨v,z⟩); h2 is sublinear so the infimum is 0 or −inf.
  const auto m = minimize_minus_linear(h2, v);
  if (!m) {
    out.lhs = ExtReal::infinity();
  } else if (m->is_infinite()) {
    throw NumericalError("g_parabolic_conjugate_check: parabolic subderivative has empty domain");
  } else {
    out.lhs = ExtReal(std::abs(m->value()) <= 1e-12 ? 0.0 : -m->value());
  }
  const bool in_a = is_subgradient(g, y, v) &&
                    std::abs(du.value() - v.dot(u)) <= kFeasTol * (1.0 + u.norm() * (1.0 + v.norm()));
  out.rhs = in_a ? ExtReal(0.0) : ExtReal::infinity();
  return out;
}

ExtReal g_conjugate_lp(const PolyhedralFn& g, const Vec& y) {
  const auto m = minimize_minus_linear(g, y);
  if (!m) return ExtReal::infinity();
  if (m->is_infinite()) throw DomainError("g_conjugate: g has empty domain");
  return ExtReal(-m->value());
}

ExtReal g_conjugate(const PolyhedralFn& g, const Vec& y) {
  require_dim(y.size(), g.dim(), "g_conjugate");
  using PF = PolyhedralFn;
  const double tol = kFeasTol * (1.0 + y.cwiseAbs().maxCoeff());
  return std::visit(
      overloaded{
          [&](const PF::Indicator& s) {
            LpResult r = lp_solve(LpProblem::over(s.set, y, LpSense::kMax));
            if (r.status == LpStatus::kInfeasible) throw DomainError("g_conjugate: empty set");
            return r.status == LpStatus::kUnbounded ? ExtReal::infinity() : ExtReal(r.value);
          },
          [&](const PF::MaxAffine& s) {
            // min −⟨λ,β⟩ over the simplex with Σ λ_i a_i = y.
            const int k = static_cast<int>(s.slopes.rows());
            LpProblem lp;
            lp.c = -s.offsets;
            lp.A = -Mat::Identity(k, k);
            lp.b = Vec::Zero(k);
            lp.E = Mat(g.dim() + 1, k);
            lp.E << s.slopes.transpose(), Mat::Ones(1, k);
            lp.d = Vec(g.dim() + 1);
            lp.d << y, 1.0;
            LpResult r = lp_solve(lp);
            return r.status == LpStatus::kOptimal ? ExtReal(r.value) : ExtReal::infinity();
          },
          [&](const PF::L1Norm& s) {
            for (int i = 0; i < g.dim(); ++i) {
              const bool in = std::binary_search(s.coords.begin(), s.coords.end(), i);
              if (std::abs(y(i)) > (in ? 1.0 + tol : tol)) return ExtReal::infinity();
            }
            return ExtReal(0.0);
          },
          [&](const PF::LinfNorm&) {
            return y.lpNorm<1>() <= 1.0 + tol ? ExtReal(0.0) : ExtReal::infinity();
          },
          [&](const PF::Affine& s) {
            return (y - s.slope).cwiseAbs().maxCoeff() <= tol ? ExtReal(-s.offset) : ExtReal::infinity();
          },
          [&](const PF::Sum&) { return g_conjugate_lp(g, y); }},
      g.variant());
}

PolyCone tangent_cone(const Polyhedron& P, const Vec& y) {
  if (!P.contains(y)) throw DomainError("tangent_cone: point outside the polyhedron");
  const std::vector<int> act = P.active_rows(y);
  Mat A(static_cast<Eigen::Index>(act.size()), P.dim());
  std::vector<bool> eq;
  for (size_t i = 0; i < act.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = P.A().row(act[i]);
    eq.push_back(P.is_equality(act[i]));
  }
  return PolyCone(Polyhedron(A, Vec::Zero(static_cast<Eigen::Index>(act.size())), eq));
}

Polyhedron second_order_tangent_set(const Polyhedron& P, const Vec& y, const Vec& u) {
  const PolyCone T = tangent_cone(P, y);
  if (!T.contains(u)) throw DomainError("second_order_tangent_set: direction is not tangent");
  const Polyhedron& TP = T.polyhedron();
  return tangent_cone(TP, u).polyhedron();
}

}  // namespace varcalc
