#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "hypgeo/moebius.hpp"

namespace hypgeo {

// Point on the hyperbolic sheet: <v,v> = -1, v0 > 0.
struct HPoint {
  MinkowskiVec v;
  static HPoint from(const MinkowskiVec& v);
};

// Point on the de Sitter quadric: <v,v> = +1.
struct DSPoint {
  MinkowskiVec v;
  static DSPoint from(const MinkowskiVec& v);
};

// Totally geodesic plane v^perp in the hyperbolic sheet, oriented by its unit
// spacelike normal n (pointing out of the half-space {<x,n> < 0}).
struct OrientedPlane {
  MinkowskiVec n;
  static OrientedPlane from(const MinkowskiVec& n);
};

// Polar duality: a plane's unit normal as a de Sitter point, and back.
DSPoint plane_dual(const OrientedPlane& P);
OrientedPlane point_dual(const DSPoint& q);

enum class PairCase { intersecting, asymptotic, disjoint };
struct PlanePairClass {
  PairCase kind = PairCase::intersecting;
  double value = 0;  // dihedral angle | 0 | hyperbolic distance
};

// With p = <n1, n2>: |p| < 1 intersecting with angle arccos(p); |p| = 1
// (within 1e-9) asymptotic; |p| > 1 disjoint at distance arccosh|p|.
// Identical or opposite planes -> "degenerate pair".
PlanePairClass classify_plane_pair(const OrientedPlane& P1, const OrientedPlane& P2);

enum class SegCase { spacelike, lightlike, timelike };
struct SegmentClass {
  SegCase kind = SegCase::spacelike;
  double length = 0;
};

// Geodesic segment type between de Sitter points, same pairing thresholds;
// agrees with classify_plane_pair through plane_dual (spacelike length =
// intersection angle, timelike length = plane distance).
SegmentClass dual_segment_type(const DSPoint& q1, const DSPoint& q2);

// Curvatures of the surface at distance d from a totally geodesic plane:
// induced K = -1/cosh^2(d), third-fundamental-form K_III = -1/sinh^2(d),
// satisfying K_III = K/(K+1).
std::pair<double, double> equidistant_curvatures(double d);

// Orientation-preserving ambient isometry (identity component of O(3,1)),
// generated as exp of a random pairing-antisymmetric element; apply()
// preserves mink(u,v) to roundoff. Used to probe invariance of the duality.
struct LorentzTransform {
  double m[4][4] = {};
  MinkowskiVec apply(const MinkowskiVec& v) const;
  static LorentzTransform random(std::uint64_t seed);
};

struct PolyDualEdge {
  int i = 0, j = 0;
  double length = 0;  // exterior dihedral angle of the face pair
};

struct PolyhedralDual {
  std::vector<DSPoint> vertices;  // one per face
  std::vector<PolyDualEdge> edges;
};

// Discrete dual surface of a convex cap: dual vertex per face, dual edge per
// adjacent face pair with length equal to the exterior dihedral angle. Any
// adjacent pair that fails to intersect -> "not a convex cap".
PolyhedralDual polyhedral_dual(const std::vector<OrientedPlane>& faces,
                               const std::vector<std::pair<int, int>>& adjacency);

}  // namespace hypgeo
