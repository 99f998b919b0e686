#include "hypgeo/earthquake.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>

#include "hypgeo/errors.hpp"

namespace hypgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuakeResidual = 1e-8;
// Interior basepoint for generator paths; any generic point works, crossings
// only shift along the lifts.
const std::complex<double> kX0{0.31, 1.07};

std::complex<double> mobius_z(const Isometry2& g, std::complex<double> z) {
  return (g.a * z + g.b) / (g.c * z + g.d);
}

double bact(const Isometry2& g, double x) {
  if (std::isinf(x)) return g.c == 0 ? kInf : g.a / g.c;
  double den = g.c * x + g.d;
  if (den == 0) return kInf;
  double r = (g.a * x + g.b) / den;
  return std::isfinite(r) ? r : kInf;
}

double bval(const BoundaryPoint& p) { return p.infinite ? kInf : p.value; }

Isometry2 diag_R(double s) {
  return Isometry2::from(std::exp(s / 2), 0, 0, std::exp(-s / 2));
}

// Maps the geodesic through interior points x, y to the imaginary axis with
// x -> i and y straight above it.
Isometry2 seg_normalizer(std::complex<double> x, std::complex<double> y) {
  Isometry2 F;
  if (std::abs(x.real() - y.real()) < 1e-12) {
    F = Isometry2::from(1, -x.real(), 0, 1);
  } else {
    double cx = (std::norm(x) - std::norm(y)) / (2 * (x.real() - y.real()));
    double r = std::hypot(x.real() - cx, x.imag());
    F = normalizer(BoundaryPoint::at(cx - r), BoundaryPoint::at(cx + r));
  }
  if (mobius_z(F, y).imag() < mobius_z(F, x).imag())
    F = compose(Isometry2::from(0, -1, 1, 0), F);
  double s = -std::log(mobius_z(F, x).imag());
  return compose(diag_R(s), F);
}

// Translation by s along the geodesic directed from p (repelling) to q.
Isometry2 trans_along(double p, double q, double s) {
  auto as_bp = [](double v) {
    return std::isinf(v) ? BoundaryPoint::at_infinity() : BoundaryPoint::at(v);
  };
  Isometry2 F = normalizer(as_bp(p), as_bp(q));
  return compose(inverse(F), compose(diag_R(s), F));
}

std::pair<double, double> canon(double p, double q) {
  if (std::isinf(p)) return {q, p};
  if (std::isinf(q)) return {p, q};
  return p < q ? std::make_pair(p, q) : std::make_pair(q, p);
}

struct SegAxisSet {
  static constexpr double kRes = 1e-7;
  std::map<std::pair<long long, long long>, std::vector<std::pair<double, double>>>
      buckets;
  static double gcoord(double x) {
    if (std::isinf(x)) return 1e9;
    return x < 0 ? -std::log1p(-x) : std::log1p(x);
  }
  bool insert(double p, double q) {
    double gp = gcoord(p), gq = gcoord(q);
    long long kp = std::llround(gp / kRes), kq = std::llround(gq / kRes);
    for (long long dp = -1; dp <= 1; ++dp)
      for (long long dq = -1; dq <= 1; ++dq) {
        auto it = buckets.find({kp + dp, kq + dq});
        if (it == buckets.end()) continue;
        for (const auto& [op, oq] : it->second)
          if (std::abs(op - gp) < kRes && std::abs(oq - gq) < kRes) return false;
      }
    buckets[{kp, kq}].push_back({gp, gq});
    return true;
  }
};

struct Crossing {
  double pos;        // along the normalized segment
  double p, q;       // lift endpoints in the original frame
  double weight;
};

// Lifts of the component crossing the interior segment [x, y]: positions and
// endpoint pairs, in segment order.
std::vector<Crossing> axis_orbit_near_segment(const FuchsianRep& rep,
                                              const CurveClass& comp,
                                              std::complex<double> x,
                                              std::complex<double> y, double weight,
                                              int max_radius) {
  Isometry2 dm = sm_to_isometry(rep.evaluate(cyclically_reduce(comp.word)));
  double Ld = curve_length(rep, comp);
  Isometry2 F = seg_normalizer(x, y);
  Isometry2 Fi = inverse(F);

  Isometry2 gens[8];
  for (int k = 0; k < 4; ++k) {
    Isometry2 m = rep.image(k);
    gens[2 * k] = compose(compose(F, m), Fi);
    gens[2 * k + 1] = inverse(gens[2 * k]);
  }

  double d_seg = std::log(mobius_z(F, y).imag());
  auto [rd, ad] = fixed_points(dm);
  auto seed = canon(bact(F, bval(rd)), bact(F, bval(ad)));

  double prune = 2 * std::max(Ld, 1.0) + 8;
  auto dist_to_seg = [&](double p, double q) {
    if (std::isinf(p) || std::isinf(q)) return 0.0;
    if (p * q < 0) {
      double t = 0.5 * (std::log(std::abs(p)) + std::log(std::abs(q)));
      if (t >= 0 && t <= d_seg) return 0.0;
      return std::min(std::abs(t), std::abs(t - d_seg));
    }
    double lo = std::min(std::abs(p), std::abs(q));
    double hi = std::max(std::abs(p), std::abs(q));
    if (hi - lo <= 0) return kInf;
    double r = (hi + lo) / (hi - lo);
    return r <= 1 ? 0.0 : std::acosh(r);
  };

  SegAxisSet seen;
  seen.insert(seed.first, seed.second);
  std::vector<std::pair<double, double>> frontier = {seed}, axes = {seed};
  bool complete = false;
  for (int radius = 0; radius < max_radius; ++radius) {
    std::vector<std::pair<double, double>> next;
    for (const auto& pq : frontier) {
      for (const Isometry2& gm : gens) {
        auto img = canon(bact(gm, pq.first), bact(gm, pq.second));
        if (dist_to_seg(img.first, img.second) > prune) continue;
        if (!seen.insert(img.first, img.second)) continue;
        next.push_back(img);
        axes.push_back(img);
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) {
      complete = true;
      break;
    }
  }
  if (!complete)
    throw budget_error("budget exhausted", -1, static_cast<long>(axes.size()));

  std::vector<Crossing> out;
  for (const auto& [p, q] : axes) {
    if (std::isinf(p) || std::isinf(q) || p * q >= 0) continue;
    double t = 0.5 * (std::log(std::abs(p)) + std::log(std::abs(q)));
    if (t > 1e-12 && t < d_seg - 1e-12)
      out.push_back({t, bact(Fi, p), bact(Fi, q), weight});
  }
  std::sort(out.begin(), out.end(),
            [](const Crossing& a, const Crossing& b) { return a.pos < b.pos; });
  return out;
}

Isometry2 word_image_dense(const std::array<Isometry2, 4>& imgs, const Word& w) {
  Isometry2 acc = Isometry2::identity();
  for (int t : w) {
    int g = std::abs(t) - 1;
    acc = compose(acc, t > 0 ? imgs[g] : inverse(imgs[g]));
  }
  return acc;
}

FuchsianRep quake_insert(const FenchelNielsen& base, const PantsGraph& topo,
                         const MultiCurve& lam, double t, int sign) {
  FuchsianRep rep = holonomy_from_fn(base, topo);
  std::array<Isometry2, 4> imgs;
  for (int k = 0; k < 4; ++k) {
    Isometry2 g = rep.image(k);
    std::complex<double> y = mobius_z(g, kX0);
    std::vector<Crossing> crossings;
    for (const auto& [cw, w] : lam.components) {
      auto part = axis_orbit_near_segment(rep, cw, kX0, y, w, 14);
      crossings.insert(crossings.end(), part.begin(), part.end());
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.pos < b.pos; });
    Isometry2 pref = Isometry2::identity();
    for (const Crossing& c : crossings) {
      // A left earthquake shears toward the attractor when seen from the
      // left of the directed lift.
      Isometry2 F = normalizer(BoundaryPoint::at(c.p), BoundaryPoint::at(c.q));
      bool side_left = mobius_z(F, kX0).real() < 0;
      double s = t * c.weight * (side_left ? 1 : -1) * sign;
      pref = compose(pref, trans_along(c.p, c.q, s));
    }
    imgs[k] = compose(pref, g);
  }
  Isometry2 rel = word_image_dense(imgs, parse_word(topo.relator_str));
  double residual = frobenius_dist(rel, Isometry2::identity());
  if (!(residual < kQuakeResidual))
    throw rep_error("earthquake insertion missed relator tolerance", residual);
  return FuchsianRep::from_images(imgs, topo, residual);
}

}  // namespace

FuchsianRep earthquake_signed(const EarthquakePath& path, int sign) {
  if (!(path.t >= 0) || !std::isfinite(path.t))
    throw validation_error("earthquake scale must be a finite nonnegative real");
  if (sign != 1 && sign != -1) throw validation_error("earthquake sign must be +-1");
  path.lamination.validate_weights();
  path.topo.validate();
  path.base.validate(path.topo);

  if (path.method == QuakeMethod::fn_twist) {
    FenchelNielsen fn = path.base;
    for (const auto& [c, w] : path.lamination.components) {
      auto j = path.topo.match_pants_curve(c);
      if (!j) throw validation_error("unsupported fast path");
      fn.twists[*j] += sign * path.t * w;
    }
    return holonomy_from_fn(fn, path.topo);
  }
  return quake_insert(path.base, path.topo, path.lamination, path.t, sign);
}

FuchsianRep earthquake(const EarthquakePath& path) { return earthquake_signed(path, 1); }

LemmaCertificate verify_length_estimate(const FenchelNielsen& base,
                                        const PantsGraph& topo, const MultiCurve& l,
                                        const CurveClass& gamma,
                                        const std::vector<double>& t_grid, double slack,
                                        const EnumerationBudget& budget) {
  LemmaCertificate cert;
  cert.gamma = gamma;
  cert.lamination = l;
  cert.t_grid = t_grid;
  cert.slack = slack;

  FuchsianRep rep0 = holonomy_from_fn(base, topo);
  cert.intersection = lamination_intersection(rep0, l, gamma, budget);
  cert.base_length = curve_length(rep0, gamma);

  bool pants_support = true;
  for (const auto& [c, w] : l.components)
    if (!topo.match_pants_curve(c)) pants_support = false;

  cert.pass = true;
  for (double t : t_grid) {
    EarthquakePath path{base, topo, l, t,
                        pants_support ? QuakeMethod::fn_twist
                                      : QuakeMethod::holonomy_insert};
    FuchsianRep rept = earthquake(path);
    double Lt = curve_length(rept, gamma);
    double lo = cert.intersection * t - cert.base_length;
    double hi = cert.intersection * t + cert.base_length;
    cert.measured.push_back(Lt);
    cert.lower.push_back(lo);
    cert.upper.push_back(hi);
    if (!(lo - slack <= Lt && Lt <= hi + slack)) cert.pass = false;
  }
  return cert;
}

double asymptotic_slope(const FenchelNielsen& base, const PantsGraph& topo,
                        const MultiCurve& l, const CurveClass& gamma, double t_large,
                        const EnumerationBudget& budget) {
  if (!(t_large > 0)) throw validation_error("slope evaluation needs t > 0");
  bool pants_support = true;
  for (const auto& [c, w] : l.components)
    if (!topo.match_pants_curve(c)) pants_support = false;
  EarthquakePath path{base, topo, l, t_large,
                      pants_support ? QuakeMethod::fn_twist
                                    : QuakeMethod::holonomy_insert};
  (void)budget;
  FuchsianRep rept = earthquake(path);
  return curve_length(rept, gamma) / t_large;
}

}  // namespace hypgeo
