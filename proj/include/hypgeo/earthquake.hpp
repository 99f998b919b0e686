#pragma once
#include <vector>

#include "hypgeo/holonomy.hpp"
#include "hypgeo/laminations.hpp"

namespace hypgeo {

enum class QuakeMethod { fn_twist, holonomy_insert };

// Left earthquake along a weighted multicurve, scaled by t >= 0.
struct EarthquakePath {
  FenchelNielsen base;
  PantsGraph topo;
  MultiCurve lamination;
  double t = 0;
  QuakeMethod method = QuakeMethod::fn_twist;
};

// fn_twist: shifts each supported twist by t * weight (support must consist
// of pants curves of the decomposition, else "unsupported fast path").
// holonomy_insert: rebuilds generator images by inserting a translation
// along each lift of the support crossed by the generator's basepoint path.
// Either way the result passes the relator check to 1e-8.
FuchsianRep earthquake(const EarthquakePath& path);

// sign = +1 is the left earthquake; -1 the right one (for symmetry tests).
FuchsianRep earthquake_signed(const EarthquakePath& path, int sign);

// Pointwise certificate of the two-sided length estimate
//   i(gamma, l) * t - L_0(gamma) <= L_t(gamma) <= i(gamma, l) * t + L_0(gamma)
// along an earthquake ray, with explicit recorded slack.
struct LemmaCertificate {
  CurveClass gamma;
  MultiCurve lamination;
  std::vector<double> t_grid;
  double intersection = 0;  // i(gamma, l)
  double base_length = 0;   // L_0
  std::vector<double> measured, lower, upper;
  double slack = 0;
  bool pass = false;
};

LemmaCertificate verify_length_estimate(const FenchelNielsen& base,
                                        const PantsGraph& topo, const MultiCurve& l,
                                        const CurveClass& gamma,
                                        const std::vector<double>& t_grid, double slack,
                                        const EnumerationBudget& budget = {});

// L_t(gamma) / t at t = t_large; approaches i(gamma, l) within L_0 / t_large.
double asymptotic_slope(const FenchelNielsen& base, const PantsGraph& topo,
                        const MultiCurve& l, const CurveClass& gamma, double t_large,
                        const EnumerationBudget& budget = {});

}  // namespace hypgeo
