#include "hypgeo/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypgeo/errors.hpp"

namespace hypgeo {

namespace {
constexpr double kEpsDet = 1e-12;

void normalize(double& a, double& b, double& c, double& d) {
  double det = a * d - b * c;
  if (!(det > 0) || !std::isfinite(det))
    throw validation_error("isometry must have positive determinant");
  double s = std::sqrt(det);
  a /= s; b /= s; c /= s; d /= s;
  double tr = a + d;
  if (tr < 0 || (tr == 0 && (c < 0 || (c == 0 && b < 0)))) {
    a = -a; b = -b; c = -c; d = -d;
  }
}
}  // namespace

Isometry2 Isometry2::from(double a, double b, double c, double d) {
  normalize(a, b, c, d);
  Isometry2 g{a, b, c, d};
  // Cancellation in ad - bc grows with the product magnitude, so the residual
  // bound must too; a fixed absolute tolerance rejects valid large entries.
  double mag = std::max(1.0, std::abs(g.a * g.d) + std::abs(g.b * g.c));
  if (std::abs(g.a * g.d - g.b * g.c - 1.0) > kEpsDet * mag)
    throw validation_error("determinant normalization failed");
  return g;
}

Isometry2 compose(const Isometry2& g, const Isometry2& h) {
  return Isometry2::from(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                         g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

Isometry2 inverse(const Isometry2& g) {
  return Isometry2::from(g.d, -g.b, -g.c, g.a);
}

double frobenius_dist(const Isometry2& g, const Isometry2& h) {
  double dp = std::max({std::abs(g.a - h.a), std::abs(g.b - h.b),
                        std::abs(g.c - h.c), std::abs(g.d - h.d)});
  double dm = std::max({std::abs(g.a + h.a), std::abs(g.b + h.b),
                        std::abs(g.c + h.c), std::abs(g.d + h.d)});
  return std::min(dp, dm);
}

std::string to_string(IsomClass c) {
  switch (c) {
    case IsomClass::identity: return "identity";
    case IsomClass::elliptic: return "elliptic";
    case IsomClass::parabolic: return "parabolic";
    case IsomClass::hyperbolic: return "hyperbolic";
  }
  return "?";
}

IsomClass classify_isometry(const Isometry2& g, double eps_tr) {
  double tr = g.a + g.d;  // >= 0 after normalization
  if (tr > 2.0 + eps_tr) return IsomClass::hyperbolic;
  if (tr < 2.0 - eps_tr) return IsomClass::elliptic;
  double off = std::max({std::abs(g.a - 1), std::abs(g.b), std::abs(g.c),
                         std::abs(g.d - 1)});
  return off <= eps_tr ? IsomClass::identity : IsomClass::parabolic;
}

double translation_length(const Isometry2& g) {
  if (classify_isometry(g) != IsomClass::hyperbolic)
    throw validation_error("no positive translation length");
  return 2.0 * std::acosh((g.a + g.d) / 2.0);
}

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q) {
  if (p.infinite || q.infinite) return p.infinite && q.infinite;
  return p.value == q.value;
}

BoundaryPoint mobius_boundary(const Isometry2& g, const BoundaryPoint& p) {
  if (p.infinite) {
    if (g.c == 0) return BoundaryPoint::at_infinity();
    return BoundaryPoint::at(g.a / g.c);
  }
  double den = g.c * p.value + g.d;
  if (den == 0) return BoundaryPoint::at_infinity();
  return BoundaryPoint::at((g.a * p.value + g.b) / den);
}

std::pair<BoundaryPoint, BoundaryPoint> fixed_points(const Isometry2& g) {
  if (classify_isometry(g) != IsomClass::hyperbolic)
    throw validation_error("fixed-point pair requires a hyperbolic isometry");
  if (g.c == 0) {
    // Fixed points infinity and b/(d-a); |a| > |d| makes infinity attracting.
    BoundaryPoint p = BoundaryPoint::at(g.b / (g.d - g.a));
    if (std::abs(g.a) > std::abs(g.d))
      return {p, BoundaryPoint::at_infinity()};
    return {BoundaryPoint::at_infinity(), p};
  }
  double tr = g.a + g.d;
  double disc = std::sqrt(tr * tr - 4.0);
  double x1 = ((g.a - g.d) + disc) / (2.0 * g.c);
  double x2 = ((g.a - g.d) - disc) / (2.0 * g.c);
  // Derivative of the action at x is (cx+d)^-2; attracting iff |cx+d| > 1.
  if (std::abs(g.c * x1 + g.d) > 1.0) return {BoundaryPoint::at(x2), BoundaryPoint::at(x1)};
  return {BoundaryPoint::at(x1), BoundaryPoint::at(x2)};
}

GeodesicLine axis(const Isometry2& g) {
  auto [r, a] = fixed_points(g);
  return GeodesicLine{r, a};
}

bool geodesics_link(const GeodesicLine& u, const GeodesicLine& v) {
  const BoundaryPoint pts[4] = {u.e1, u.e2, v.e1, v.e2};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (same_point(pts[i], pts[j]))
        throw validation_error("degenerate configuration");
  // Send u.e2 to infinity; u becomes the vertical line over A and v links it
  // iff A lies strictly between the images of v's endpoints.
  auto send = [&](const BoundaryPoint& p) -> double {
    if (u.e2.infinite) return p.value;  // p finite: distinct from u.e2
    if (p.infinite) return 0.0;         // -1/(z - u.e2) -> 0 as z -> inf
    return -1.0 / (p.value - u.e2.value);
  };
  double A = send(u.e1), B1 = send(v.e1), B2 = send(v.e2);
  return (B1 < A) != (B2 < A);
}

Isometry2 normalizer(const BoundaryPoint& p_rep, const BoundaryPoint& p_att) {
  if (same_point(p_rep, p_att)) throw validation_error("degenerate configuration");
  if (p_att.infinite) return Isometry2::from(1.0, -p_rep.value, 0.0, 1.0);
  if (p_rep.infinite) return Isometry2::from(0.0, -1.0, 1.0, -p_att.value);
  if (p_att.value > p_rep.value)
    return Isometry2::from(1.0, -p_rep.value, -1.0, p_att.value);
  return Isometry2::from(-1.0, p_rep.value, -1.0, p_att.value);
}

double mink(const MinkowskiVec& u, const MinkowskiVec& v) {
  return -u.x0 * v.x0 + u.x1 * v.x1 + u.x2 * v.x2 + u.x3 * v.x3;
}

MinkowskiVec operator+(const MinkowskiVec& u, const MinkowskiVec& v) {
  return {u.x0 + v.x0, u.x1 + v.x1, u.x2 + v.x2, u.x3 + v.x3};
}

MinkowskiVec operator-(const MinkowskiVec& u, const MinkowskiVec& v) {
  return {u.x0 - v.x0, u.x1 - v.x1, u.x2 - v.x2, u.x3 - v.x3};
}

MinkowskiVec operator*(double s, const MinkowskiVec& u) {
  return {s * u.x0, s * u.x1, s * u.x2, s * u.x3};
}

// ---------------------------------------------------------------------------
// ScaledMat
// ---------------------------------------------------------------------------

ScaledMat sm_make(double a, double b, double c, double d, double logs) {
  double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (m == 0 || !std::isfinite(m))
    throw validation_error("scaled matrix requires finite nonzero entries");
  return ScaledMat{a / m, b / m, c / m, d / m, logs + std::log(m)};
}

ScaledMat sm_from(const Isometry2& g) { return sm_make(g.a, g.b, g.c, g.d); }

ScaledMat sm_twist(double s) {
  if (s >= 0) return ScaledMat{1.0, 0.0, 0.0, std::exp(-s), s / 2.0};
  return ScaledMat{std::exp(s), 0.0, 0.0, 1.0, -s / 2.0};
}

Isometry2 sm_to_isometry(const ScaledMat& s) {
  if (s.logs > 350.0)
    throw rep_error("matrix entries exceed double range; use the scaled form");
  double e = std::exp(s.logs);
  return Isometry2::from(s.m00 * e, s.m01 * e, s.m10 * e, s.m11 * e);
}

ScaledMat sm_mul(const ScaledMat& x, const ScaledMat& y) {
  return sm_make(x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
                 x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11,
                 x.logs + y.logs);
}

ScaledMat sm_inv(const ScaledMat& x) {
  double det = x.m00 * x.m11 - x.m01 * x.m10;
  if (det == 0) throw validation_error("singular matrix has no inverse");
  return sm_make(x.m11 / det, -x.m01 / det, -x.m10 / det, x.m00 / det, -x.logs);
}

double sm_dist_projective(const ScaledMat& x, const Isometry2& t) {
  if (x.logs > 350.0) return std::numeric_limits<double>::infinity();
  double e = std::exp(x.logs);
  double a = x.m00 * e, b = x.m01 * e, c = x.m10 * e, d = x.m11 * e;
  double dp = std::max({std::abs(a - t.a), std::abs(b - t.b),
                        std::abs(c - t.c), std::abs(d - t.d)});
  double dm = std::max({std::abs(a + t.a), std::abs(b + t.b),
                        std::abs(c + t.c), std::abs(d + t.d)});
  return std::min(dp, dm);
}

std::pair<double, double> sm_trace(const ScaledMat& x) {
  return {x.m00 + x.m11, x.logs};
}

IsomClass classify_scaled_trace(double t, double logs, double eps_tr) {
  double at = std::abs(t);
  if (at == 0) return IsomClass::elliptic;
  double lt = std::log(at) + logs;
  if (lt >= 50.0) return IsomClass::hyperbolic;
  double v = at * std::exp(logs);
  if (v > 2.0 + eps_tr) return IsomClass::hyperbolic;
  if (v < 2.0 - eps_tr) return IsomClass::elliptic;
  return IsomClass::parabolic;  // identity indistinguishable from trace alone
}

double translation_length_scaled(double t, double logs) {
  double at = std::abs(t);
  if (at == 0) throw validation_error("no positive translation length");
  double lt = std::log(at) + logs;
  if (lt < 50.0) {
    double v = at * std::exp(logs);
    if (v <= 2.0) throw validation_error("no positive translation length");
    return 2.0 * std::acosh(v / 2.0);
  }
  // acosh(x) = log x + log(1 + sqrt(1 - x^-2)); here x = e^lt / 2.
  double x_inv2 = 4.0 * std::exp(-2.0 * lt);
  return 2.0 * (lt - std::log(2.0) + std::log1p(std::sqrt(1.0 - x_inv2)));
}

// ---------------------------------------------------------------------------
// Factored words
// ---------------------------------------------------------------------------

void fpush(FactorList& out, const Factor& f) {
  if (f.diag && f.s == 0) return;
  if (!out.empty() && out.back().diag && f.diag) {
    out.back().s += f.s;  // exact merge of twist parameters
    if (out.back().s == 0) out.pop_back();
    return;
  }
  if (!out.empty() && !out.back().diag && !f.diag) {
    out.back().mat = sm_mul(out.back().mat, f.mat);
    return;
  }
  out.push_back(f);
}

void fappend(FactorList& out, const FactorList& fs) {
  for (const Factor& f : fs) fpush(out, f);
}

FactorList fmerge(const FactorList& fs) {
  FactorList out;
  out.reserve(fs.size());
  fappend(out, fs);
  return out;
}

FactorList finv(const FactorList& fs) {
  FactorList out;
  out.reserve(fs.size());
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
    if (it->diag)
      fpush(out, Factor::twist(-it->s));
    else
      fpush(out, Factor::dense(sm_inv(it->mat)));
  }
  return out;
}

ScaledMat feval(const FactorList& fs, double* peak_logs) {
  ScaledMat acc{};  // identity
  double peak = 0;
  for (const Factor& f : fs) {
    acc = sm_mul(acc, f.diag ? sm_twist(f.s) : f.mat);
    peak = std::max(peak, std::abs(acc.logs));
  }
  if (peak_logs) *peak_logs = peak;
  return acc;
}

std::pair<double, double> ftrace(const FactorList& fs) {
  FactorList w = fmerge(fs);
  // tr(F X G) = tr((G F) X): rotate boundary factors together while they
  // merge exactly (diagonals) or cheaply (denses).
  bool changed = true;
  while (changed && w.size() > 1) {
    changed = false;
    if (w.front().diag && w.back().diag) {
      double s = w.front().s + w.back().s;
      w.pop_back();
      w.erase(w.begin());
      FactorList nw;
      fpush(nw, Factor::twist(s));
      fappend(nw, w);
      w = std::move(nw);
      changed = true;
    } else if (!w.front().diag && !w.back().diag) {
      ScaledMat m = sm_mul(w.back().mat, w.front().mat);
      w.pop_back();
      w.erase(w.begin());
      FactorList nw;
      fpush(nw, Factor::dense(m));
      fappend(nw, w);
      w = std::move(nw);
      changed = true;
    }
  }
  if (w.empty()) return {2.0, 0.0};  // identity word
  return sm_trace(feval(w));
}

}  // namespace hypgeo
