#include "hypgeo/laminations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hypgeo/errors.hpp"

namespace hypgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Boundary action on R u {inf}; only +inf is used as the point at infinity.
double bact(const Isometry2& g, double x) {
  if (std::isinf(x)) return g.c == 0 ? kInf : g.a / g.c;
  double den = g.c * x + g.d;
  if (den == 0) return kInf;
  double r = (g.a * x + g.b) / den;
  return std::isfinite(r) ? r : kInf;
}

double bval(const BoundaryPoint& p) { return p.infinite ? kInf : p.value; }

// Unordered endpoint pair with infinity stored second.
std::pair<double, double> canon(double p, double q) {
  if (std::isinf(p)) return {q, p};
  if (std::isinf(q)) return {p, q};
  return p < q ? std::make_pair(p, q) : std::make_pair(q, p);
}

// Axis endpoints deduplicated in a boundary-compactifying coordinate:
// sign(x) log(1+|x|) keeps resolution proportional to 1/|x|, which matches
// the hyperbolic geometry of how distinct conjugate axes separate. Buckets
// plus a 3x3 neighbor sweep make the match threshold seam-free.
struct AxisSet {
  static constexpr double kRes = 1e-7;
  std::map<std::pair<long long, long long>, std::vector<std::pair<double, double>>>
      buckets;

  static double gcoord(double x) {
    if (std::isinf(x)) return 1e9;  // far beyond any finite log1p value
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

// Distance from the geodesic (p, q) to the imaginary axis (0 if they cross
// or share an end at 0/inf).
double dist_to_core(double p, double q) {
  if (std::isinf(p) || std::isinf(q)) return 0;
  if (p * q < 0) return 0;
  double lo = std::min(std::abs(p), std::abs(q));
  double hi = std::max(std::abs(p), std::abs(q));
  if (hi - lo <= 0) return kInf;
  double r = (hi + lo) / (hi - lo);
  return r <= 1 ? 0 : std::acosh(r);
}

// Transverse crossing of the imaginary axis, excluding near-degenerate axes
// that shadow the core itself (endpoint within noise of 0 or infinity).
bool links_core(double p, double q) {
  if (std::isinf(p) || std::isinf(q)) return false;
  if (std::abs(p) < 1e-9 || std::abs(q) < 1e-9) return false;
  return p * q < 0;
}

double crossing_pos(double p, double q) {
  return 0.5 * (std::log(std::abs(p)) + std::log(std::abs(q)));
}

Isometry2 word_image(const FuchsianRep& rep, const Word& w) {
  return sm_to_isometry(rep.evaluate(cyclically_reduce(w)));
}

// Core enumeration: count lifts of delta whose axes cross the fundamental
// segment [0, L(gamma)) on gamma's normalized axis.
int linking_count(const FuchsianRep& rep, const CurveClass& gamma,
                  const CurveClass& delta, const EnumerationBudget& budget) {
  budget.validate();
  if (rep.word_class(gamma.word) != IsomClass::hyperbolic ||
      rep.word_class(delta.word) != IsomClass::hyperbolic)
    throw validation_error("not realized by a geodesic");

  Isometry2 g = word_image(rep, gamma.word);
  Isometry2 dm = word_image(rep, delta.word);
  double L = curve_length(rep, gamma);
  double Ld = curve_length(rep, delta);

  auto [rg, ag] = fixed_points(g);
  Isometry2 F = normalizer(rg, ag);
  Isometry2 Fi = inverse(F);

  Isometry2 gens[8];
  for (int k = 0; k < 4; ++k) {
    Isometry2 m = rep.image(k);
    gens[2 * k] = compose(compose(F, m), Fi);
    gens[2 * k + 1] = inverse(gens[2 * k]);
  }

  auto [rd, ad] = fixed_points(dm);
  auto seed = canon(bact(F, bval(rd)), bact(F, bval(ad)));

  double prune = L / 2 + 2 * std::max(Ld, 1.0) + 6;

  // Distinct crossings are counted modulo the deck translation R(L): an
  // enumerated translate of a crossing lift with parameter in [-L, L) is
  // reduced into [0, L) by the exact diagonal scaling and deduplicated there.
  // Counting unreduced axes against a fixed position window undercounts
  // whenever the search reaches only an out-of-window translate of some
  // crossing. Translates beyond one period are ignored rather than reduced:
  // endpoint precision decays like e^{|s|} * eps, so a far translate lands
  // near - but measurably off - the true reduced axis and would be
  // double-counted; its in-band sibling is a group translate the search
  // reaches by a short word, and the stability window covers "not yet".
  AxisSet crossings;
  int ncross = 0;
  auto note_axis = [&](double p, double q) {
    if (!links_core(p, q)) return;
    double s = crossing_pos(p, q);
    if (s < -L || s >= L) return;
    double rp = p, rq = q;
    if (s < 0) {
      rp = std::copysign(std::exp(std::log(std::abs(p)) + L), p);
      rq = std::copysign(std::exp(std::log(std::abs(q)) + L), q);
    }
    auto red = canon(rp, rq);
    if (crossings.insert(red.first, red.second)) ++ncross;
  };

  AxisSet seen;
  seen.insert(seed.first, seed.second);
  note_axis(seed.first, seed.second);
  std::vector<std::pair<double, double>> frontier = {seed};
  std::vector<int> counts;
  for (int radius = 1; radius <= budget.max_radius; ++radius) {
    std::vector<std::pair<double, double>> next;
    for (const auto& pq : frontier) {
      for (const Isometry2& gm : gens) {
        auto img = canon(bact(gm, pq.first), bact(gm, pq.second));
        if (dist_to_core(img.first, img.second) > prune) continue;
        if (!seen.insert(img.first, img.second)) continue;
        next.push_back(img);
        note_axis(img.first, img.second);
      }
    }
    frontier = std::move(next);
    counts.push_back(ncross);
    if (static_cast<int>(counts.size()) >= budget.window) {
      bool stable = true;
      for (int k = 1; k < budget.window; ++k)
        if (counts[counts.size() - 1 - k] != ncross) stable = false;
      if (stable) return ncross;
    }
  }
  long last = counts.empty() ? -1 : counts.back();
  long prev = counts.size() < 2 ? -1 : counts[counts.size() - 2];
  throw budget_error("budget exhausted", prev, last);
}

}  // namespace

void EnumerationBudget::validate() const {
  if (window < 2 || max_radius < window)
    throw validation_error("enumeration budget needs max_radius >= window >= 2");
}

void MultiCurve::validate_weights() const {
  for (const auto& [c, w] : components) {
    if (!(w > 0) || !std::isfinite(w))
      throw validation_error("multicurve weights must be strictly positive");
    if (cyclically_reduce(c.word).empty())
      throw validation_error("multicurve component is trivial");
  }
}

void MultiCurve::validate(const FuchsianRep& rep, const EnumerationBudget& budget) const {
  validate_weights();
  for (size_t i = 0; i < components.size(); ++i) {
    if (!is_simple(rep, components[i].first, budget))
      throw validation_error("multicurve component is not simple");
    for (size_t j = i + 1; j < components.size(); ++j)
      if (intersection_number(rep, components[i].first, components[j].first, budget) != 0)
        throw validation_error("multicurve components are not disjoint");
  }
}

MultiCurve MultiCurve::scaled(double s) const {
  if (!(s > 0) || !std::isfinite(s))
    throw validation_error("multicurve scale must be strictly positive");
  MultiCurve out = *this;
  for (auto& [c, w] : out.components) w *= s;
  return out;
}

int intersection_number(const FuchsianRep& rep, const CurveClass& gamma,
                        const CurveClass& delta, const EnumerationBudget& budget) {
  return linking_count(rep, gamma, delta, budget);
}

double lamination_intersection(const FuchsianRep& rep, const MultiCurve& l,
                               const CurveClass& gamma,
                               const EnumerationBudget& budget) {
  l.validate_weights();
  double total = 0;
  for (const auto& [c, w] : l.components)
    total += w * intersection_number(rep, gamma, c, budget);
  return total;
}

bool is_simple(const FuchsianRep& rep, const CurveClass& gamma,
               const EnumerationBudget& budget) {
  return linking_count(rep, gamma, gamma, budget) == 0;
}

}  // namespace hypgeo
