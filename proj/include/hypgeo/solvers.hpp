#pragma once
#include <utility>
#include <vector>

#include "hypgeo/earthquake.hpp"
#include "hypgeo/holonomy.hpp"
#include "hypgeo/laminations.hpp"

namespace hypgeo {

// Curvature K of a convex surface in (-1, 0) together with the curvature
// K* = K/(K+1) of its third fundamental form.
struct CurvatureParam {
  double K = -0.5;
  double K_star = -1.0;

  static CurvatureParam from_K(double K);  // validates K in (-1, 0)
};

// A constant-curvature metric h = (1/|curvature|) m presented by the
// Fenchel-Nielsen shape of its underlying hyperbolic metric m.
struct ScaledMetric {
  FenchelNielsen shape;
  double curvature = -1.0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0;           // final max-abs residual / gradient norm
  std::vector<double> solution;  // solver coordinates at exit
  double condition = 0;          // FD Jacobian/Hessian condition estimate
};

// Marking-set length spectrum (9 values, marking_set() order).
std::vector<double> marking_spectrum(const FenchelNielsen& fn, const PantsGraph& topo);

// Solve for signed twist offsets w on the supported pants curves so that the
// earthquake from m0 matches the target marking spectrum: Levenberg-Marquardt
// with finite-difference Jacobian and slope-table multistart.
std::pair<std::vector<double>, SolveReport> invert_earthquake(
    const FenchelNielsen& m0, const PantsGraph& topo, const std::vector<double>& target,
    const std::vector<int>& support, double tol = 1e-8);

// u_K(h) = (1/sqrt|K*|) (E_L^{m0})^{-1}(m) with m = |K*| h, as a weighted
// multicurve over the supported pants curves. Rejects inputs needing a
// right twist ("not a left-earthquake image").
MultiCurve u_map(const CurvatureParam& K, const ScaledMetric& h,
                 const FenchelNielsen& m0, const PantsGraph& topo,
                 const std::vector<int>& support);

struct UniformSweepRow {
  double K = 0, t = 0;
  double scaled_length = 0;   // L_{h_n(t)}(gamma)
  double intersection = 0;    // i(u_K(h_n(t)), gamma)
  double deviation = 0;       // |difference|
  double bound = 0;           // L_{m0}(gamma) / sqrt|K*|
  bool pass = false;
};

struct UniformSweepReport {
  std::vector<UniformSweepRow> rows;
  double max_deviation = 0;
  bool pass = true;
};

// Checks |L_{h_n(t)}(gamma) - i(u_{K_n}(h_n(t)), gamma)| <= L_{m0}(gamma)/sqrt|K_n*|
// over the K list and t grid, where h_n(t) = (1/|K_n*|) E_L^{m0}(sqrt|K_n*| t l).
UniformSweepReport uniform_u_convergence_sweep(
    const FenchelNielsen& m0, const PantsGraph& topo, const std::vector<double>& K_list,
    const std::vector<double>& t_grid, const MultiCurve& l, const CurveClass& gamma,
    double slack = 1e-6, const EnumerationBudget& budget = {});

// Minimize the total weighted length of mu + omega over Fenchel-Nielsen
// coordinates (lengths in log scale, quasi-Newton with FD gradients plus a
// Newton polish). Divergence toward the length bounds raises
// "non-filling or escaping minimum".
std::pair<FenchelNielsen, SolveReport> project_current(
    const MultiCurve& mu, const MultiCurve& omega, const FenchelNielsen& start,
    const PantsGraph& topo, double tol = 1e-6, const EnumerationBudget& budget = {});

// Necessary-condition check: the current meets every probe curve.
bool is_filling_heuristic(const FuchsianRep& rep, const MultiCurve& mu,
                          const std::vector<CurveClass>& probes,
                          const EnumerationBudget& budget = {});

}  // namespace hypgeo
