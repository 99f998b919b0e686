#pragma once
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hypgeo {

// ---------------------------------------------------------------------------
// Orientation-preserving isometries of the hyperbolic plane, upper-half-plane
// model. Stored as a 2x2 real matrix with det = 1 and trace >= 0 (the
// trace-sign normalization removes the +-I ambiguity once and for all).
// ---------------------------------------------------------------------------
struct Isometry2 {
  double a = 1, b = 0, c = 0, d = 1;

  static Isometry2 identity() { return {}; }
  // Normalizes an arbitrary positive-determinant matrix; rejects det <= 0.
  static Isometry2 from(double a, double b, double c, double d);
};

Isometry2 compose(const Isometry2& g, const Isometry2& h);
Isometry2 inverse(const Isometry2& g);
double frobenius_dist(const Isometry2& g, const Isometry2& h);

enum class IsomClass { identity, elliptic, parabolic, hyperbolic };
std::string to_string(IsomClass c);

// Classification by |trace|: < 2 elliptic, = 2 (within eps_tr) parabolic or
// identity, > 2 hyperbolic.
IsomClass classify_isometry(const Isometry2& g, double eps_tr = 1e-9);

// 2 arccosh(|tr|/2); throws on non-hyperbolic input.
double translation_length(const Isometry2& g);

struct BoundaryPoint {
  double value = 0;
  bool infinite = false;

  static BoundaryPoint at_infinity() { return {0, true}; }
  static BoundaryPoint at(double v) { return {v, false}; }
};

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q);
BoundaryPoint mobius_boundary(const Isometry2& g, const BoundaryPoint& p);

struct GeodesicLine {
  BoundaryPoint e1, e2;  // unordered pair, distinct
};

// (repelling, attracting) fixed points on the boundary; hyperbolic g only.
std::pair<BoundaryPoint, BoundaryPoint> fixed_points(const Isometry2& g);
GeodesicLine axis(const Isometry2& g);

// True iff the endpoint pairs interleave in the cyclic boundary order,
// i.e. the geodesics cross exactly once. Shared endpoint -> error.
bool geodesics_link(const GeodesicLine& u, const GeodesicLine& v);

// Orientation-preserving isometry sending p_rep -> 0 and p_att -> infinity,
// so a hyperbolic element with that (repelling, attracting) pair conjugates
// to an expanding diagonal. Coincident inputs -> error.
Isometry2 normalizer(const BoundaryPoint& p_rep, const BoundaryPoint& p_att);

// ---------------------------------------------------------------------------
// Minkowski R^{3,1}: bilinear pairing <x,y> = -x0 y0 + x1 y1 + x2 y2 + x3 y3.
// ---------------------------------------------------------------------------
struct MinkowskiVec {
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0;
};

double mink(const MinkowskiVec& u, const MinkowskiVec& v);
MinkowskiVec operator+(const MinkowskiVec& u, const MinkowskiVec& v);
MinkowskiVec operator-(const MinkowskiVec& u, const MinkowskiVec& v);
MinkowskiVec operator*(double s, const MinkowskiVec& u);

// ---------------------------------------------------------------------------
// Scale-carrying 2x2 matrices: value = m * e^{logs} with max |m_ij| ~ 1.
// This is how long words at extreme twist parameters stay inside double
// range; every higher module funnels its matrix work through these.
// ---------------------------------------------------------------------------
struct ScaledMat {
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  double logs = 0;
};

ScaledMat sm_make(double a, double b, double c, double d, double logs = 0);
ScaledMat sm_from(const Isometry2& g);
// R(s) = diag(e^{s/2}, e^{-s/2}): translation by |s| along the axis (0, inf).
ScaledMat sm_twist(double s);
// Throws rep_error if the true entries exceed double range.
Isometry2 sm_to_isometry(const ScaledMat& s);
ScaledMat sm_mul(const ScaledMat& x, const ScaledMat& y);
ScaledMat sm_inv(const ScaledMat& x);
// max_ij |value_ij - target_ij| minimized over the +- sign.
double sm_dist_projective(const ScaledMat& x, const Isometry2& target);

// trace as (t, logs): trace value = t * e^{logs}
std::pair<double, double> sm_trace(const ScaledMat& x);

IsomClass classify_scaled_trace(double t, double logs, double eps_tr = 1e-9);
// Stable 2 arccosh(|tr|/2) straight from log-magnitude; throws on
// non-hyperbolic traces.
double translation_length_scaled(double t, double logs);

// ---------------------------------------------------------------------------
// Factored words: a product of factors, each either the diagonal
// R(s) = diag(e^{s/2}, e^{-s/2}) kept EXACTLY as its parameter s, or a dense
// ScaledMat. Adjacent diagonals merge by adding parameters (exact), adjacent
// denses merge numerically; traces may additionally rotate factors
// cyclically. Twist parameters then cancel structurally instead of through
// catastrophic floating-point cancellation.
// ---------------------------------------------------------------------------
struct Factor {
  bool diag = true;
  double s = 0;      // diag: R(s)
  ScaledMat mat;     // dense
  static Factor twist(double s) { return Factor{true, s, {}}; }
  static Factor dense(const ScaledMat& m) { return Factor{false, 0, m}; }
};

using FactorList = std::vector<Factor>;

// Append one factor, merging with the current tail when kinds match.
void fpush(FactorList& out, const Factor& f);
void fappend(FactorList& out, const FactorList& fs);
FactorList fmerge(const FactorList& fs);
FactorList finv(const FactorList& fs);
// Left-to-right product; if peak_logs is given, records the largest
// intermediate log-scale (the honest amplification bound for residuals).
ScaledMat feval(const FactorList& fs, double* peak_logs = nullptr);
// Trace after cyclic boundary merges; returns (t, logs).
std::pair<double, double> ftrace(const FactorList& fs);

}  // namespace hypgeo
