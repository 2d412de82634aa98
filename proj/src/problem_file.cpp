#include "varcalc/problem_file.hpp"

#include <fstream>
#include <set>

#include "varcalc/catalog.hpp"

namespace varcalc {

namespace {

using json = nlohmann::ordered_json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(path_.empty() ? "/" : path_, msg); }

  void object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw SchemaError(path_ + "/" + it.key(), "unknown key");
    }
  }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  Reader at(const char* key) const {
    if (!j_.contains(key)) fail(std::string("missing key \"") + key + "\"");
    return Reader(j_.at(key), path_ + "/" + key);
  }
  Reader at(size_t i) const { return Reader(j_.at(i), path_ + "/" + std::to_string(i)); }
  size_t size() const { return j_.size(); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  long integer(long lo, long hi) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const long v = j_.get<long>();
    if (v < lo || v > hi) fail("must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0)) fail("must be positive");
    return v;
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  const json& array() const {
    if (!j_.is_array()) fail("expected an array");
    return j_;
  }
  Vec vec(int expected = -1) const {
    array();
    if (expected >= 0 && static_cast<int>(j_.size()) != expected) {
      fail("expected " + std::to_string(expected) + " entries, got " + std::to_string(j_.size()));
    }
    Vec v(static_cast<Eigen::Index>(j_.size()));
    for (size_t i = 0; i < j_.size(); ++i) v(static_cast<Eigen::Index>(i)) = at(i).number();
    return v;
  }
  Mat mat(int cols) const {
    array();
    Mat M(static_cast<Eigen::Index>(j_.size()), cols);
    for (size_t i = 0; i < j_.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = at(i).vec(cols).transpose();
    return M;
  }

 private:
  const json& j_;
  std::string path_;
};

Expr parse_expr(const Reader& r, int n) {
  const std::string text = r.string();
  Expr e;
  try {
    e = Expr::parse(text, n);
  } catch (const Error& ex) {
    r.fail(ex.what());
  }
  if (e.max_variable() >= n) r.fail("expression uses x" + std::to_string(e.max_variable()) + " but n = " + std::to_string(n));
  return e;
}

PolyhedralFn parse_g(const Reader& r, int m) {
  if (!r.raw().is_object()) r.fail("expected an object");
  const std::string v = r.at("variant").string();
  if (v == "indicator") {
    if (r.has("set")) {
      r.object({"variant", "set"});
      const std::string set = r.at("set").string();
      if (set == "nonpositive_orthant") return PolyhedralFn::indicator(Polyhedron::nonpositive_orthant(m));
      if (set == "nonnegative_orthant") return PolyhedralFn::indicator(Polyhedron::nonnegative_orthant(m));
      r.at("set").fail("unknown set (nonpositive_orthant, nonnegative_orthant)");
    }
    r.object({"variant", "A", "b", "eq"});
    const Mat A = r.at("A").mat(m);
    const Vec b = r.at("b").vec(static_cast<int>(A.rows()));
    std::vector<bool> eq(static_cast<size_t>(A.rows()), false);
    if (r.has("eq")) {
      const Reader e = r.at("eq");
      e.array();
      if (e.size() != eq.size()) e.fail("expected one flag per row");
      for (size_t i = 0; i < eq.size(); ++i) eq[i] = e.at(i).boolean();
    }
    return PolyhedralFn::indicator(Polyhedron(A, b, eq));
  }
  if (v == "max_affine") {
    r.object({"variant", "slopes", "offsets"});
    const Mat S = r.at("slopes").mat(m);
    if (S.rows() == 0) r.at("slopes").fail("needs at least one piece");
    return PolyhedralFn::max_affine(S, r.at("offsets").vec(static_cast<int>(S.rows())));
  }
  if (v == "l1") {
    r.object({"variant", "coords"});
    if (!r.has("coords")) return PolyhedralFn::l1(m);
    const Reader c = r.at("coords");
    c.array();
    std::vector<int> coords;
    for (size_t i = 0; i < c.size(); ++i) coords.push_back(static_cast<int>(c.at(i).integer(0, m - 1)));
    return PolyhedralFn::l1_on(m, coords);
  }
  if (v == "linf") {
    r.object({"variant"});
    return PolyhedralFn::linf(m);
  }
  if (v == "affine") {
    r.object({"variant", "slope", "offset"});
    return PolyhedralFn::affine(r.at("slope").vec(m), r.has("offset") ? r.at("offset").number() : 0.0);
  }
  if (v == "zero") {
    r.object({"variant"});
    return PolyhedralFn::zero(m);
  }
  if (v == "sum") {
    r.object({"variant", "terms"});
    const Reader t = r.at("terms");
    t.array();
    if (t.size() == 0) t.fail("needs at least one term");
    std::vector<PolyhedralFn> terms;
    for (size_t i = 0; i < t.size(); ++i) terms.push_back(parse_g(t.at(i), m));
    return PolyhedralFn::sum(std::move(terms));
  }
  r.at("variant").fail("unknown variant (indicator, max_affine, l1, linf, affine, zero, sum)");
}

std::optional<SmoothOracle> parse_phi(const Reader& r, int n, const FdSteps& fd) {
  if (r.raw().is_null()) return std::nullopt;
  if (!r.raw().is_object()) r.fail("expected an object");
  if (r.has("expr")) {
    r.object({"expr"});
    return SmoothOracle::from_expr(parse_expr(r.at("expr"), n), n).with_fd_steps(fd);
  }
  if (r.has("quadratic")) {
    r.object({"quadratic"});
    const Reader q = r.at("quadratic");
    q.object({"Q", "c"});
    const Mat Q = q.at("Q").mat(n);
    if (Q.rows() != n) q.at("Q").fail("expected an n x n matrix");
    const Vec c = q.has("c") ? q.at("c").vec(n) : Vec(Vec::Zero(n));
    return SmoothOracle::quadratic(Q, c).with_fd_steps(fd);
  }
  if (r.has("catalog")) {
    r.object({"catalog"});
    if (n != 1) r.fail("catalog phi functions are one-dimensional");
    try {
      return catalog_phi(r.at("catalog").string()).with_fd_steps(fd);
    } catch (const DomainError& e) {
      r.at("catalog").fail(e.what());
    }
  }
  r.fail("expected one of expr, quadratic, catalog");
}

void parse_options(const Reader& r, ProblemOptions& o) {
  r.object({"seed", "fd", "schedule", "budgets"});
  if (r.has("seed")) o.seed = static_cast<std::uint64_t>(r.at("seed").integer(0, std::numeric_limits<long>::max()));
  if (r.has("fd")) {
    const Reader f = r.at("fd");
    f.object({"grad_rel", "hess_rel"});
    if (f.has("grad_rel")) o.fd.grad_rel = f.at("grad_rel").positive();
    if (f.has("hess_rel")) o.fd.hess_rel = f.at("hess_rel").positive();
  }
  if (r.has("schedule")) {
    const Reader s = r.at("schedule");
    s.object({"t0", "ratio", "levels", "c", "directions", "refine_evals", "divergence_threshold"});
    GridSchedule& g = o.schedule;
    if (s.has("t0")) g.t0 = s.at("t0").positive();
    if (s.has("ratio")) g.ratio = s.at("ratio").positive();
    if (s.has("levels")) g.levels = static_cast<int>(s.at("levels").integer(1, 200));
    if (s.has("c")) g.c = s.at("c").positive();
    if (s.has("directions")) g.directions = static_cast<int>(s.at("directions").integer(0, 100000));
    if (s.has("refine_evals")) g.refine_evals = static_cast<int>(s.at("refine_evals").integer(0, 100000));
    if (s.has("divergence_threshold")) g.divergence_threshold = s.at("divergence_threshold").positive();
    try {
      g.validate();
    } catch (const Error& e) {
      s.fail(e.what());
    }
  }
  if (r.has("budgets")) {
    const Reader b = r.at("budgets");
    b.object({"gamma", "samples", "face_samples", "max_faces", "max_vertices", "kappa", "max_k", "pairs",
              "msqc_radius", "msqc_samples"});
    GrowthBudget& g = o.budget;
    if (b.has("gamma")) g.gamma = b.at("gamma").positive();
    if (b.has("samples")) g.samples = static_cast<int>(b.at("samples").integer(1, 1000000));
    if (b.has("face_samples")) g.face_samples = static_cast<int>(b.at("face_samples").integer(0, 1000000));
    if (b.has("max_faces")) g.max_faces = static_cast<int>(b.at("max_faces").integer(1, 100000));
    if (b.has("max_vertices")) g.max_vertices = static_cast<int>(b.at("max_vertices").integer(1, 100000));
    if (b.has("kappa")) g.kappa = b.at("kappa").positive();
    if (b.has("max_k")) o.falsify.max_k = b.at("max_k").integer(1, 1L << 40);
    if (b.has("pairs")) o.falsify.pairs = b.at("pairs").integer(1, 1L << 40);
    if (b.has("msqc_radius")) o.msqc_radius = b.at("msqc_radius").positive();
    if (b.has("msqc_samples")) o.msqc_samples = static_cast<int>(b.at("msqc_samples").integer(1, 1000000));
  }
}

}  // namespace

GradientProbe ProblemFile::gradient() const {
  const CompositeProblem p = *problem;
  return [p](const Vec& x) -> Vec {
    Vec grad = p.phi_gradient(x);
    const PolyhedralFn& g = p.polyhedral();
    const Vec Fx = p.F().value(x);
    if (g.value(Fx, 0.0).is_infinite()) throw EvalError("x outside dom f");
    const Generators sub = g.subgradients(Fx);
    if (sub.points.size() != 1 || !sub.rays.empty() || !sub.lines.empty()) {
      throw EvalError("f is not differentiable at x");
    }
    return grad + p.F().jacobian(x).transpose() * sub.points[0];
  };
}

ProblemFile parse_problem(const json& doc, std::optional<std::uint64_t> seed_override,
                          std::optional<FdSteps> fd_override) {
  const Reader r(doc, "");
  r.object({"n", "m", "phi", "F", "g", "x_bar", "v_bar", "options"});
  ProblemFile pf;
  pf.source = doc;
  pf.n = static_cast<int>(r.at("n").integer(1, 64));
  if (r.has("options")) parse_options(r.at("options"), pf.options);
  if (seed_override) pf.options.seed = *seed_override;
  if (fd_override) pf.options.fd = *fd_override;
  pf.options.schedule.seed = pf.options.seed;
  pf.options.budget.seed = pf.options.seed;
  pf.options.falsify.seed = pf.options.seed;

  std::optional<SmoothMap> F;
  if (r.has("F")) {
    const Reader fr = r.at("F");
    fr.array();
    if (fr.size() == 0) fr.fail("F needs at least one component");
    std::vector<Expr> comps;
    for (size_t i = 0; i < fr.size(); ++i) comps.push_back(parse_expr(fr.at(i), pf.n));
    F = SmoothMap::from_exprs(comps, pf.n).with_fd_steps(pf.options.fd);
  } else {
    F = SmoothMap::identity(pf.n);
  }
  pf.m = r.has("m") ? static_cast<int>(r.at("m").integer(1, 64)) : F->dim_out();
  if (pf.m != F->dim_out()) r.at("m").fail("m = " + std::to_string(pf.m) + " but F has " + std::to_string(F->dim_out()) + " components");

  const PolyhedralFn g = r.has("g") ? parse_g(r.at("g"), pf.m) : PolyhedralFn::zero(pf.m);
  const std::optional<SmoothOracle> phi = r.has("phi") ? parse_phi(r.at("phi"), pf.n, pf.options.fd) : std::nullopt;
  const Vec x_bar = r.at("x_bar").vec(pf.n);
  std::optional<Vec> v_bar;
  if (r.has("v_bar")) v_bar = r.at("v_bar").vec(pf.n);
  try {
    pf.problem.emplace(phi, *F, g, x_bar, v_bar);
  } catch (const EvalError& e) {
    r.at("x_bar").fail(std::string("cannot evaluate at x_bar: ") + e.what());
  }
  if (pf.problem->g_value(pf.problem->F_bar()).is_infinite()) r.at("x_bar").fail("F(x_bar) is outside dom g");
  return pf;
}

ProblemFile load_problem(const std::string& path, std::optional<std::uint64_t> seed_override,
                         std::optional<FdSteps> fd_override) {
  std::ifstream in(path);
  if (!in) throw InconsistentInput("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(doc, seed_override, fd_override);
}

CompositeProblem with_v_bar(const CompositeProblem& p, const Vec& v_bar) {
  return CompositeProblem(p.phi(), p.F(), p.g(), p.x_bar(), v_bar);
}

}  // namespace varcalc
