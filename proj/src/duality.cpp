#include "hypgeo/duality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hypgeo/errors.hpp"
#include "hypgeo/rng.hpp"

namespace hypgeo {

namespace {
constexpr double kEpsUnit = 1e-10;
constexpr double kEpsLight = 1e-9;  // detection window around |pairing| = 1

double clamp_abs1(double x) { return std::clamp(x, -1.0, 1.0); }

bool componentwise_close(const MinkowskiVec& u, const MinkowskiVec& v, double eps) {
  return std::abs(u.x0 - v.x0) < eps && std::abs(u.x1 - v.x1) < eps &&
         std::abs(u.x2 - v.x2) < eps && std::abs(u.x3 - v.x3) < eps;
}

void reject_degenerate(const MinkowskiVec& u, const MinkowskiVec& v) {
  if (componentwise_close(u, v, kEpsLight) ||
      componentwise_close(u, -1.0 * v, kEpsLight))
    throw validation_error("degenerate pair");
}

// Shared pairing classification: |p| below / at / above 1.
int pairing_case(double p) {
  double a = std::abs(p);
  if (a < 1.0 - kEpsLight) return -1;
  if (a <= 1.0 + kEpsLight) return 0;
  return 1;
}
}  // namespace

HPoint HPoint::from(const MinkowskiVec& v) {
  if (std::abs(mink(v, v) + 1.0) >= kEpsUnit)
    throw validation_error("hyperbolic point must have pairing -1");
  if (!(v.x0 > 0))
    throw validation_error("hyperbolic point must lie on the future sheet");
  return HPoint{v};
}

DSPoint DSPoint::from(const MinkowskiVec& v) {
  if (std::abs(mink(v, v) - 1.0) >= kEpsUnit)
    throw validation_error("de Sitter point must have pairing +1");
  return DSPoint{v};
}

OrientedPlane OrientedPlane::from(const MinkowskiVec& n) {
  if (std::abs(mink(n, n) - 1.0) >= kEpsUnit)
    throw validation_error("plane normal must be unit spacelike");
  return OrientedPlane{n};
}

DSPoint plane_dual(const OrientedPlane& P) { return DSPoint::from(P.n); }

OrientedPlane point_dual(const DSPoint& q) { return OrientedPlane::from(q.v); }

PlanePairClass classify_plane_pair(const OrientedPlane& P1, const OrientedPlane& P2) {
  reject_degenerate(P1.n, P2.n);
  double p = mink(P1.n, P2.n);
  switch (pairing_case(p)) {
    case -1:
      return {PairCase::intersecting, std::acos(clamp_abs1(p))};
    case 0:
      return {PairCase::asymptotic, 0.0};
    default:
      return {PairCase::disjoint, std::acosh(std::abs(p))};
  }
}

SegmentClass dual_segment_type(const DSPoint& q1, const DSPoint& q2) {
  reject_degenerate(q1.v, q2.v);
  double p = mink(q1.v, q2.v);
  switch (pairing_case(p)) {
    case -1:
      return {SegCase::spacelike, std::acos(clamp_abs1(p))};
    case 0:
      return {SegCase::lightlike, 0.0};
    default:
      return {SegCase::timelike, std::acosh(std::abs(p))};
  }
}

std::pair<double, double> equidistant_curvatures(double d) {
  if (!(d > 0) || !std::isfinite(d))
    throw validation_error("equidistant family needs d > 0");
  double ch = std::cosh(d), sh = std::sinh(d);
  return {-1.0 / (ch * ch), -1.0 / (sh * sh)};
}

MinkowskiVec LorentzTransform::apply(const MinkowskiVec& v) const {
  double in[4] = {v.x0, v.x1, v.x2, v.x3};
  double out[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i] += m[i][j] * in[j];
  return {out[0], out[1], out[2], out[3]};
}

LorentzTransform LorentzTransform::random(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  // Algebra element: symmetric 0i blocks (boosts), antisymmetric ij blocks
  // (rotations) -- exactly the matrices with (Mx, y) + (x, My) = 0.
  double A[4][4] = {};
  double b[3], r[3];
  for (double& v : b) v = unif(g, -0.5, 0.5);
  for (double& v : r) v = unif(g, -0.5, 0.5);
  A[0][1] = A[1][0] = b[0];
  A[0][2] = A[2][0] = b[1];
  A[0][3] = A[3][0] = b[2];
  A[1][2] = r[0], A[2][1] = -r[0];
  A[1][3] = r[1], A[3][1] = -r[1];
  A[2][3] = r[2], A[3][2] = -r[2];
  // exp(A) by plain series; ||A|| <= ~1.5 so 30 terms are far past roundoff.
  LorentzTransform L;
  double term[4][4] = {};
  for (int i = 0; i < 4; ++i) L.m[i][i] = term[i][i] = 1;
  for (int k = 1; k <= 30; ++k) {
    double next[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        for (int s = 0; s < 4; ++s) next[i][j] += term[i][s] * A[s][j];
        next[i][j] /= k;
      }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        term[i][j] = next[i][j];
        L.m[i][j] += next[i][j];
      }
  }
  return L;
}

PolyhedralDual polyhedral_dual(const std::vector<OrientedPlane>& faces,
                               const std::vector<std::pair<int, int>>& adjacency) {
  if (faces.size() < 2)
    throw validation_error("polyhedral cap needs at least two faces");
  PolyhedralDual out;
  out.vertices.reserve(faces.size());
  for (const OrientedPlane& f : faces) out.vertices.push_back(plane_dual(f));
  int n = static_cast<int>(faces.size());
  for (const auto& [i, j] : adjacency) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw validation_error("adjacency references missing faces");
    PlanePairClass c = classify_plane_pair(faces[i], faces[j]);
    if (c.kind != PairCase::intersecting)
      throw validation_error("not a convex cap");
    out.edges.push_back({i, j, c.value});
  }
  return out;
}

}  // namespace hypgeo
