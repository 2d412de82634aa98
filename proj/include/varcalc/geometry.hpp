#pragma once

#include <cstdint>
#include <vector>

#include "varcalc/common.hpp"
#include "varcalc/polyhedron.hpp"

namespace varcalc {

inline constexpr int kMaxEnumDim = 8;
inline constexpr size_t kMaxEnumRays = 20000;

struct ConeGenerators {
  std::vector<Vec> rays;   // extreme rays, unit norm
  std::vector<Vec> lines;  // orthonormal lineality basis
};

// Generators of {x : ineq·x ≤ 0, eq·x = 0} by double description.
ConeGenerators cone_generators(const Mat& ineq, const Mat& eq, int dim);

// V-representation of P; `points` is empty iff P is empty.
// Every point is re-verified against the H-rows.
Generators vertex_enumerate(const Polyhedron& P);

// H-representation of conv(points) + cone(rays) + span(lines). Requires a point.
Polyhedron hull(const Generators& G);

// Image {M y : y ∈ P} for a nonempty P.
Generators map_generators(const Generators& G, const Mat& M);
// Minkowski sum of two V-representations.
Generators minkowski_sum(const Generators& a, const Generators& b);

struct Projection {
  Vec point;
  double distance = 0;
};
// Euclidean projection by a primal active-set QP. Throws DomainError when P is empty.
Projection project_onto_polyhedron(const Polyhedron& P, const Vec& x);

struct ConeFace {
  PolyCone cone;               // H-representation of the face
  Mat basis;                   // orthonormal basis of span(face)
  std::vector<Vec> rays;       // generators of the pointed part (may be empty for subspaces)
  std::vector<Vec> lines;
  bool is_subspace() const { return rays.empty(); }
};

struct FaceQuadraticMin {
  double value = 0;     // min of ⟨w,Qw⟩ over the unit sphere of the face (certified) or a sampled upper bound
  double lower = 0;     // λ_min of BᵀQB, always a valid lower bound
  bool certified = false;
  Vec argmin;
};

// Builds a ConeFace from an H-described cone.
ConeFace make_face(const PolyCone& cone);
FaceQuadraticMin min_quadratic_on_cone_face(const Mat& Q, const ConeFace& face, int samples = 256,
                                            std::uint64_t seed = 1);

// Orthonormal basis of span(vectors) in R^dim.
Mat orthonormal_span(const std::vector<Vec>& vectors, int dim);

}  // namespace varcalc
