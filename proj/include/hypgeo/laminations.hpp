#pragma once
#include <utility>
#include <vector>

#include "hypgeo/holonomy.hpp"

namespace hypgeo {

// Orbit enumeration cutoffs: word radius for the conjugate search and the
// number of consecutive radii whose crossing count must agree before the
// count is accepted.
struct EnumerationBudget {
  int max_radius = 12;
  int window = 3;

  void validate() const;  // requires max_radius >= window >= 2
};

// Rational measured lamination: disjoint simple closed curves with positive
// weights.
struct MultiCurve {
  std::vector<std::pair<CurveClass, double>> components;

  void validate_weights() const;
  // Full invariant: positive weights, every component simple, components
  // pairwise disjoint (checked against the given holonomy).
  void validate(const FuchsianRep& rep, const EnumerationBudget& budget = {}) const;
  MultiCurve scaled(double s) const;
};

// Geometric intersection number of two closed-curve classes: lifts of delta
// crossing a fundamental segment of gamma's axis, counted once the tally is
// stable across the budget's window. Throws budget_error ("budget exhausted")
// with the last two counts when it never stabilizes.
int intersection_number(const FuchsianRep& rep, const CurveClass& gamma,
                        const CurveClass& delta,
                        const EnumerationBudget& budget = {});

// Weighted extension: sum of w_k * i(gamma, component_k).
double lamination_intersection(const FuchsianRep& rep, const MultiCurve& l,
                               const CurveClass& gamma,
                               const EnumerationBudget& budget = {});

// True iff the class has no transverse self-crossings (counts conjugate axes
// against the curve's own fundamental segment).
bool is_simple(const FuchsianRep& rep, const CurveClass& gamma,
               const EnumerationBudget& budget = {});

}  // namespace hypgeo
