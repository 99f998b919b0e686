#include "hypgeo/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hypgeo/errors.hpp"

namespace hypgeo {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using ResidualFn = std::function<VectorXd(const VectorXd&)>;
using ScalarFn = std::function<double(const VectorXd&)>;

MatrixXd fd_jacobian(const ResidualFn& f, const VectorXd& w, double h = 1e-6) {
  VectorXd r0 = f(w);
  MatrixXd J(r0.size(), w.size());
  for (int j = 0; j < w.size(); ++j) {
    VectorXd wp = w, wm = w;
    wp[j] += h;
    wm[j] -= h;
    J.col(j) = (f(wp) - f(wm)) / (2 * h);
  }
  return J;
}

struct LmResult {
  VectorXd w;
  bool converged = false;
  int iterations = 0;
  double residual = 0;
};

LmResult lm_solve(const ResidualFn& f, const VectorXd& w0, double tol,
                  int max_iter = 200) {
  LmResult out;
  VectorXd w = w0;
  double lam = 1e-3;
  VectorXd r = f(w);
  for (int it = 0; it < max_iter; ++it) {
    if (r.cwiseAbs().maxCoeff() < tol) {
      out = {w, true, it, r.cwiseAbs().maxCoeff()};
      return out;
    }
    MatrixXd J = fd_jacobian(f, w);
    MatrixXd A = J.transpose() * J;
    VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      MatrixXd D = A;
      for (int k = 0; k < A.rows(); ++k)
        D(k, k) += lam * std::max(A(k, k), 1e-12);
      VectorXd step = D.ldlt().solve(-g);
      if (!step.allFinite()) {
        lam *= 10;
        continue;
      }
      VectorXd wn = w + step;
      VectorXd rn = f(wn);
      if (rn.norm() < r.norm()) {
        w = wn;
        r = rn;
        lam = std::max(lam * 0.3, 1e-12);
        improved = true;
        break;
      }
      lam *= 10;
    }
    if (!improved) {
      out = {w, false, it, r.cwiseAbs().maxCoeff()};
      return out;
    }
  }
  double res = f(w).cwiseAbs().maxCoeff();
  out = {w, res < tol, max_iter, res};
  return out;
}

// Frozen topological slope table i(marking_k, pants_j): the large-twist
// asymptotics L ~ sum_j i * |w_j| make this a robust linear initializer for
// the twist inversion; correctness never depends on it.
const double kSlopeTable[9][3] = {
    {0, 0, 0},  // a1
    {1, 0, 0},  // b1
    {0, 0, 0},  // a2
    {0, 1, 0},  // b2
    {0, 0, 0},  // c3
    {1, 0, 0},  // a1b1
    {0, 1, 0},  // a2b2
    {0, 0, 2},  // a1a2
    {1, 1, 2},  // b1b2
};

VectorXd fd_grad(const ScalarFn& F, const VectorXd& x, double h) {
  VectorXd g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (F(xp) - F(xm)) / (2 * h);
  }
  return g;
}

MatrixXd fd_hess(const ScalarFn& F, const VectorXd& x, double h) {
  int n = static_cast<int>(x.size());
  MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h;
      xpp[j] += h;
      xpm[i] += h;
      xpm[j] -= h;
      xmp[i] -= h;
      xmp[j] += h;
      xmm[i] -= h;
      xmm[j] -= h;
      H(i, j) = H(j, i) = (F(xpp) - F(xpm) - F(xmp) + F(xmm)) / (4 * h * h);
    }
  return H;
}

struct BfgsResult {
  VectorXd x;
  bool converged = false;
  int iterations = 0;
  bool escaped = false;
};

// Quasi-Newton descent with Armijo backtracking; the first three coordinates
// (log lengths) are kept inside [log 1e-3, log 50], and running into those
// walls is reported as an escape.
BfgsResult bfgs_min(const ScalarFn& F, const VectorXd& x0, double gtol,
                    int max_iter = 500) {
  const double lo = std::log(1e-3), hi = std::log(50.0);
  BfgsResult out;
  VectorXd x = x0;
  int n = static_cast<int>(x.size());
  MatrixXd Hinv = MatrixXd::Identity(n, n);
  VectorXd g = fd_grad(F, x, 1e-6);
  double fx = F(x);
  for (int it = 0; it < max_iter; ++it) {
    if (g.cwiseAbs().maxCoeff() < gtol) {
      out = {x, true, it, false};
      return out;
    }
    VectorXd p = -Hinv * g;
    if (p.dot(g) > 0) p = -g;
    double alpha = 1.0;
    bool ok = false;
    VectorXd xn;
    double fn = 0;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + alpha * p;
      if (xn.head(3).maxCoeff() > hi || xn.head(3).minCoeff() < lo) {
        alpha *= 0.5;
        continue;
      }
      fn = F(xn);
      if (fn <= fx + 1e-4 * alpha * g.dot(p)) {
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) {
      out = {x, g.cwiseAbs().maxCoeff() < gtol, it, false};
      return out;
    }
    VectorXd gn = fd_grad(F, xn, 1e-6);
    VectorXd s = xn - x, y = gn - g;
    double sy = s.dot(y);
    if (sy > 1e-12) {
      MatrixXd I = MatrixXd::Identity(n, n);
      MatrixXd V = I - (s * y.transpose()) / sy;
      Hinv = V * Hinv * V.transpose() + (s * s.transpose()) / sy;
    }
    x = xn;
    g = gn;
    fx = fn;
    if (x.head(3).maxCoeff() > hi - 1e-9 || x.head(3).minCoeff() < lo + 1e-9) {
      out = {x, false, it, true};
      return out;
    }
  }
  out = {x, false, max_iter, false};
  return out;
}

VectorXd newton_polish(const ScalarFn& F, VectorXd x, int steps = 3) {
  for (int k = 0; k < steps; ++k) {
    VectorXd g = fd_grad(F, x, 1e-7);
    MatrixXd H = fd_hess(F, x, 1e-4);
    VectorXd dx = H.fullPivLu().solve(-g);
    if (!dx.allFinite()) return x;
    if (dx.norm() > 0.5) dx *= 0.5 / dx.norm();
    x += dx;
  }
  return x;
}

double mat_condition(const MatrixXd& M) {
  Eigen::JacobiSVD<MatrixXd> svd(M);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

CurvatureParam CurvatureParam::from_K(double K) {
  if (!(K > -1.0) || !(K < 0.0))
    throw validation_error("curvature K must lie in (-1, 0)");
  return CurvatureParam{K, K / (K + 1.0)};
}

std::vector<double> marking_spectrum(const FenchelNielsen& fn, const PantsGraph& topo) {
  FuchsianRep rep = holonomy_from_fn(fn, topo);
  std::vector<double> out;
  out.reserve(marking_set().size());
  for (const CurveClass& c : marking_set()) out.push_back(curve_length(rep, c));
  return out;
}

std::pair<std::vector<double>, SolveReport> invert_earthquake(
    const FenchelNielsen& m0, const PantsGraph& topo, const std::vector<double>& target,
    const std::vector<int>& support, double tol) {
  topo.validate();
  m0.validate(topo);
  if (target.size() != marking_set().size())
    throw validation_error("target spectrum must cover the marking set");
  if (support.empty()) throw validation_error("twist support must be nonempty");
  for (int j : support)
    if (j < 0 || j >= static_cast<int>(topo.edges.size()))
      throw validation_error("support index outside the pants curves");

  int k = static_cast<int>(support.size());
  VectorXd tgt(target.size());
  for (size_t i = 0; i < target.size(); ++i) tgt[i] = target[i];

  ResidualFn f = [&](const VectorXd& w) -> VectorXd {
    FenchelNielsen fn = m0;
    for (int j = 0; j < k; ++j) fn.twists[support[j]] += w[j];
    std::vector<double> sp = marking_spectrum(fn, topo);
    VectorXd r(sp.size());
    for (size_t i = 0; i < sp.size(); ++i) r[i] = sp[i] - target[i];
    return r;
  };

  // Linear init from the slope table: estimates twist magnitudes; signs are
  // resolved by trying every sign pattern (<= 8 extra starts).
  std::vector<double> base_spec = marking_spectrum(m0, topo);
  MatrixXd I(9, k);
  VectorXd rhs(9);
  for (int i = 0; i < 9; ++i) {
    rhs[i] = tgt[i] - base_spec[i];
    for (int j = 0; j < k; ++j) I(i, j) = kSlopeTable[i][support[j]];
  }
  VectorXd mags =
      I.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs).cwiseAbs();

  std::vector<VectorXd> starts;
  starts.push_back(VectorXd::Zero(k));
  for (int bits = 0; bits < (1 << k); ++bits) {
    VectorXd s(k);
    for (int j = 0; j < k; ++j) s[j] = (bits & (1 << j)) ? mags[j] : -mags[j];
    starts.push_back(s);
  }

  LmResult best;
  bool have = false;
  for (const VectorXd& w0 : starts) {
    LmResult r = lm_solve(f, w0, tol);
    if (!have || r.residual < best.residual) {
      best = r;
      have = true;
    }
    if (r.converged) {
      best = r;
      break;
    }
  }

  MatrixXd J = fd_jacobian(f, best.w);
  double cond = mat_condition(J);
  if (!std::isfinite(cond))
    throw solver_error("singular Jacobian in the inverse-earthquake solve");

  SolveReport report;
  report.converged = best.converged;
  report.iterations = best.iterations;
  report.residual = best.residual;
  report.condition = cond;
  std::vector<double> w(best.w.data(), best.w.data() + best.w.size());
  report.solution = w;
  return {w, report};
}

MultiCurve u_map(const CurvatureParam& K, const ScaledMetric& h,
                 const FenchelNielsen& m0, const PantsGraph& topo,
                 const std::vector<int>& support) {
  CurvatureParam kk = CurvatureParam::from_K(K.K);
  if (std::abs(K.K_star - kk.K_star) > 1e-14)
    throw validation_error("curvature parameter violates K* = K/(K+1)");
  if (std::abs(h.curvature - kk.K_star) > 1e-9 * std::max(1.0, std::abs(kk.K_star)))
    throw validation_error("scaled metric curvature does not match K*");

  // m = |K*| h is exactly the stored hyperbolic shape.
  std::vector<double> target = marking_spectrum(h.shape, topo);
  auto [w, report] = invert_earthquake(m0, topo, target, support);
  if (!report.converged)
    throw solver_error("inverse earthquake did not converge inside u_K");

  double scale = 1.0 / std::sqrt(std::abs(kk.K_star));
  MultiCurve out;
  for (size_t j = 0; j < w.size(); ++j) {
    if (w[j] < -1e-6) throw solver_error("not a left-earthquake image");
    if (w[j] < 1e-8) continue;  // numerically zero component
    out.components.push_back({topo.pants_curve(support[j]), w[j] * scale});
  }
  return out;
}

UniformSweepReport uniform_u_convergence_sweep(
    const FenchelNielsen& m0, const PantsGraph& topo, const std::vector<double>& K_list,
    const std::vector<double>& t_grid, const MultiCurve& l, const CurveClass& gamma,
    double slack, const EnumerationBudget& budget) {
  topo.validate();
  m0.validate(topo);
  l.validate_weights();
  FuchsianRep rep0 = holonomy_from_fn(m0, topo);
  double L_m0 = curve_length(rep0, gamma);

  std::vector<int> support;
  for (const auto& [c, w] : l.components) {
    auto j = topo.match_pants_curve(c);
    if (!j) throw validation_error("unsupported fast path");
    support.push_back(*j);
  }

  // Intersection numbers are topological; compute one count per pants curve.
  std::vector<int> count(topo.edges.size(), 0);
  std::vector<bool> have(topo.edges.size(), false);
  auto count_for = [&](int j) {
    if (!have[j]) {
      count[j] = intersection_number(rep0, gamma, topo.pants_curve(j), budget);
      have[j] = true;
    }
    return count[j];
  };

  UniformSweepReport report;
  for (double K : K_list) {
    CurvatureParam kk = CurvatureParam::from_K(K);
    double sq = std::sqrt(std::abs(kk.K_star));
    double bound = L_m0 / sq;
    for (double t : t_grid) {
      if (!(t >= 0) || !std::isfinite(t))
        throw validation_error("sweep grid values must be finite and nonnegative");
      FuchsianRep rept =
          t > 0 ? earthquake(EarthquakePath{m0, topo, l.scaled(sq * t), 1.0,
                                            QuakeMethod::fn_twist})
                : holonomy_from_fn(m0, topo);
      if (!rept.has_fn())
        throw solver_error("uniform sweep requires the twist-coordinate path");
      ScaledMetric h{rept.fn(), kk.K_star};
      MultiCurve u = u_map(kk, h, m0, topo, support);
      double inter = 0;
      for (const auto& [c, w] : u.components) {
        auto j = topo.match_pants_curve(c);
        if (!j) throw solver_error("recovered lamination left the pants family");
        inter += w * count_for(*j);
      }
      double Lh = curve_length(rept, gamma) / sq;
      UniformSweepRow row;
      row.K = K;
      row.t = t;
      row.scaled_length = Lh;
      row.intersection = inter;
      row.deviation = std::abs(Lh - inter);
      row.bound = bound;
      row.pass = row.deviation <= bound + slack;
      report.max_deviation = std::max(report.max_deviation, row.deviation);
      if (!row.pass) report.pass = false;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::pair<FenchelNielsen, SolveReport> project_current(
    const MultiCurve& mu, const MultiCurve& omega, const FenchelNielsen& start,
    const PantsGraph& topo, double tol, const EnumerationBudget& budget) {
  topo.validate();
  start.validate(topo);
  mu.validate_weights();
  if (!omega.components.empty()) omega.validate_weights();

  MultiCurve combined = mu;
  combined.components.insert(combined.components.end(), omega.components.begin(),
                             omega.components.end());
  if (combined.components.empty())
    throw validation_error("projection needs a nonempty current");

  FuchsianRep rep0 = holonomy_from_fn(start, topo);
  if (!is_filling_heuristic(rep0, combined, marking_set(), budget))
    throw solver_error("non-filling or escaping minimum");

  ScalarFn F = [&](const VectorXd& x) -> double {
    FenchelNielsen fn;
    fn.lengths = {std::exp(x[0]), std::exp(x[1]), std::exp(x[2])};
    fn.twists = {x[3], x[4], x[5]};
    // Barrier: line searches may probe tuples too extreme to construct or
    // certify; treat them as out of domain instead of aborting the solve.
    try {
      FuchsianRep rep = holonomy_from_fn(fn, topo);
      double total = 0;
      for (const auto& [c, w] : combined.components) total += w * curve_length(rep, c);
      return total;
    } catch (const rep_error&) {
      return 1e300;
    } catch (const validation_error&) {
      return 1e300;
    }
  };

  VectorXd x0(6);
  for (int j = 0; j < 3; ++j) x0[j] = std::log(start.lengths[j]);
  for (int j = 0; j < 3; ++j) x0[3 + j] = start.twists[j];

  BfgsResult r = bfgs_min(F, x0, tol);
  if (r.escaped) throw solver_error("non-filling or escaping minimum");
  VectorXd x = newton_polish(F, r.x);
  VectorXd g = fd_grad(F, x, 1e-7);

  SolveReport report;
  report.iterations = r.iterations;
  report.residual = g.cwiseAbs().maxCoeff();
  report.converged = report.residual < tol;
  report.condition = mat_condition(fd_hess(F, x, 1e-4));
  report.solution = std::vector<double>(x.data(), x.data() + x.size());

  FenchelNielsen out;
  out.lengths = {std::exp(x[0]), std::exp(x[1]), std::exp(x[2])};
  out.twists = {x[3], x[4], x[5]};
  return {out, report};
}

bool is_filling_heuristic(const FuchsianRep& rep, const MultiCurve& mu,
                          const std::vector<CurveClass>& probes,
                          const EnumerationBudget& budget) {
  if (probes.empty()) throw validation_error("filling heuristic needs probe curves");
  mu.validate_weights();
  for (const CurveClass& c : probes)
    if (!(lamination_intersection(rep, mu, c, budget) > 0)) return false;
  return true;
}

}  // namespace hypgeo
