#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "hypgeo/errors.hpp"
#include "hypgeo/holonomy.hpp"
#include "hypgeo/laminations.hpp"
#include "hypgeo/rng.hpp"

using namespace hypgeo;

namespace {

const PantsGraph& topo() {
  static const PantsGraph t = PantsGraph::genus2_default();
  return t;
}

const CurveClass& mark(const std::string& name) {
  for (const CurveClass& c : marking_set())
    if (c.name == name) return c;
  REQUIRE_MESSAGE(false, "unknown marking curve " << name);
  std::abort();
}

const FuchsianRep& base_rep() {
  static const FuchsianRep rep =
      holonomy_from_fn({{1.5, 1.5, 1.5}, {0.2, -0.4, 0.6}}, topo());
  return rep;
}

FenchelNielsen random_fn(std::mt19937_64& g) {
  FenchelNielsen fn;
  for (int j = 0; j < 3; ++j) fn.lengths.push_back(unif(g, 0.5, 3.0));
  for (int j = 0; j < 3; ++j) fn.twists.push_back(unif(g, -1.0, 1.0));
  return fn;
}

}  // namespace

TEST_CASE("crossing counts on the reference surface") {
  const FuchsianRep& rep = base_rep();
  auto i2 = [&](const CurveClass& a, const CurveClass& b) {
    return intersection_number(rep, a, b);
  };
  // generator pairs
  CHECK(i2(mark("a1"), mark("b1")) == 1);
  CHECK(i2(mark("b1"), mark("a1")) == 1);
  CHECK(i2(mark("a1"), mark("a2")) == 0);
  CHECK(i2(mark("a1"), mark("b2")) == 0);
  // pants curves are disjoint from each other and from themselves
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(i2(topo().pants_curve(a), topo().pants_curve(b)) == 0);
  // the separating curve meets the cross-handle curves twice
  CHECK(i2(topo().pants_curve(2), mark("b1b2")) == 2);
  CHECK(i2(mark("b1b2"), topo().pants_curve(2)) == 2);
  CHECK(i2(topo().pants_curve(2), mark("a1a2")) == 2);
  CHECK(i2(mark("a1a2"), topo().pants_curve(2)) == 2);
  // and is disjoint from curves contained in one handle
  CHECK(i2(topo().pants_curve(2), mark("a1b1")) == 0);
  CHECK(i2(topo().pants_curve(2), mark("a2b2")) == 0);
  CHECK(i2(mark("a1"), mark("c3")) == 0);
  CHECK(i2(mark("a2"), mark("c3")) == 0);
  // handle curves meet the cross-handle curves once
  CHECK(i2(topo().pants_curve(0), mark("b1b2")) == 1);
  CHECK(i2(topo().pants_curve(1), mark("b1b2")) == 1);
  CHECK(i2(topo().pants_curve(0), mark("a1a2")) == 0);
  CHECK(i2(topo().pants_curve(1), mark("a1a2")) == 0);
  CHECK(i2(mark("a1a2"), mark("b1")) == 1);
  CHECK(i2(mark("a1a2"), mark("b2")) == 1);
  CHECK(i2(mark("a1"), mark("a1b1")) == 1);
  // opposite-twist companion crosses twice
  CurveClass a1B1 = CurveClass::from_word("a1B1", "a1 B1");
  CHECK(i2(mark("a1b1"), a1B1) == 2);
}

TEST_CASE("self-crossing counts and simplicity") {
  const FuchsianRep& rep = base_rep();
  // a1 b1 a1 is conjugate to the simple class a1 a1 b1
  CurveClass w0 = CurveClass::from_word("a1b1a1", "a1 b1 a1");
  CHECK(intersection_number(rep, w0, w0) == 0);
  CHECK(is_simple(rep, w0));
  // a1 b1 A1 b1 has two essential self-crossings
  CurveClass w2 = CurveClass::from_word("a1b1A1b1", "a1 b1 A1 b1");
  CHECK(intersection_number(rep, w2, w2) == 2);
  CHECK(!is_simple(rep, w2));
  CHECK(is_simple(rep, mark("a1")));
  for (int j = 0; j < 3; ++j) CHECK(is_simple(rep, topo().pants_curve(j)));
  for (const CurveClass& c : marking_set()) CHECK(is_simple(rep, c));
}

TEST_CASE("symmetry over random marking pairs") {
  std::mt19937_64 g(41);
  for (int i = 0; i < 30; ++i) {
    FuchsianRep rep = holonomy_from_fn(random_fn(g), topo());
    const CurveClass& x = marking_set()[g() % marking_set().size()];
    const CurveClass& y = marking_set()[g() % marking_set().size()];
    CHECK(intersection_number(rep, x, y) == intersection_number(rep, y, x));
  }
}

TEST_CASE("counts depend only on the unoriented conjugacy class") {
  // every conjugate of a cyclically reduced word cyclically reduces to a
  // rotation of it, so rotations + inverses exhaust the class
  const FuchsianRep& rep = base_rep();
  auto rotate = [](Word w, std::size_t k) {
    k %= w.size();
    std::rotate(w.begin(), w.begin() + static_cast<long>(k), w.end());
    return w;
  };
  std::mt19937_64 g(42);
  for (int i = 0; i < 10; ++i) {
    const CurveClass& x = marking_set()[g() % marking_set().size()];
    const CurveClass& y = marking_set()[g() % marking_set().size()];
    CurveClass xr{"xr", rotate(x.word, 1 + g() % 3)};
    CurveClass yi{"yi", invert_word(y.word)};
    int base = intersection_number(rep, x, y);
    CHECK(intersection_number(rep, xr, y) == base);
    CHECK(intersection_number(rep, x, yi) == base);
    CHECK(intersection_number(rep, xr, yi) == base);
  }
  // sanity: conjugation really lands back on a rotation after cyclic reduction
  Word conj = cyclically_reduce(conjugate_word(parse_word("b2 a1"), mark("a1a2").word));
  CHECK(conj.size() == mark("a1a2").word.size());
}

TEST_CASE("counts are independent of the metric") {
  std::mt19937_64 g(43);
  const std::pair<const char*, const char*> pairs[] = {
      {"a1", "b1"}, {"c3", "b1b2"}, {"c1", "b1b2"}, {"c3", "a1a2"}, {"a1b1", "c3"}};
  const int want[] = {1, 2, 1, 2, 0};
  for (int rep_i = 0; rep_i < 10; ++rep_i) {
    FuchsianRep rep = holonomy_from_fn(random_fn(g), topo());
    for (int k = 0; k < 5; ++k) {
      std::string fx = pairs[k].first;
      CurveClass x = fx == "c1"   ? topo().pants_curve(0)
                     : fx == "c3" ? topo().pants_curve(2)
                                  : mark(fx);
      CHECK(intersection_number(rep, x, mark(pairs[k].second)) == want[k]);
    }
  }
}

TEST_CASE("twist substitution along a handle curve preserves counts") {
  // the right-handed substitution along c1 = a1: b1 -> b1 a1 (a1, a2, b2 fixed)
  // realizes a mapping class, so counts of substituted pairs must agree
  const FuchsianRep& rep = base_rep();
  auto twist_sub = [](const Word& w) {
    Word out;
    for (int t : w) {
      if (t == 2) {
        out.push_back(2);
        out.push_back(1);
      } else if (t == -2) {
        out.push_back(-1);
        out.push_back(-2);
      } else {
        out.push_back(t);
      }
    }
    return cyclically_reduce(freely_reduce(out));
  };
  std::mt19937_64 g(44);
  for (int i = 0; i < 10; ++i) {
    const CurveClass& x = marking_set()[g() % marking_set().size()];
    const CurveClass& y = marking_set()[g() % marking_set().size()];
    CurveClass xt{"xt", twist_sub(x.word)};
    CurveClass yt{"yt", twist_sub(y.word)};
    CHECK(intersection_number(rep, xt, yt) == intersection_number(rep, x, y));
  }
}

TEST_CASE("budget exhaustion reports the last two counts") {
  const FuchsianRep& rep = base_rep();
  // radius 2 with window 2: far too small for the cross-handle pair
  EnumerationBudget tight{2, 2};
  tight.validate();
  CHECK_THROWS_AS(intersection_number(rep, mark("b1b2"), topo().pants_curve(2), tight),
                  budget_error);
  try {
    intersection_number(rep, mark("b1b2"), topo().pants_curve(2), tight);
  } catch (const budget_error& e) {
    CHECK(std::string(e.what()) == "budget exhausted");
    CHECK(e.prev_count >= 0);
    CHECK(e.last_count >= e.prev_count);
  }
  EnumerationBudget radius_lt_window{1, 2};
  CHECK_THROWS_AS(radius_lt_window.validate(), validation_error);
  EnumerationBudget window_too_small{12, 1};
  CHECK_THROWS_AS(window_too_small.validate(), validation_error);
  EnumerationBudget minimal{2, 2};
  CHECK_NOTHROW(minimal.validate());
}

TEST_CASE("multicurve invariants") {
  const FuchsianRep& rep = base_rep();
  MultiCurve ok{{{topo().pants_curve(0), 1.0}, {topo().pants_curve(2), 0.5}}};
  CHECK_NOTHROW(ok.validate(rep));
  CHECK_NOTHROW(ok.validate_weights());

  MultiCurve bad_weight{{{topo().pants_curve(0), 0.0}}};
  CHECK_THROWS_WITH_AS(bad_weight.validate_weights(),
                       "multicurve weights must be strictly positive", validation_error);
  MultiCurve neg_weight{{{topo().pants_curve(0), -2.0}}};
  CHECK_THROWS_AS(neg_weight.validate_weights(), validation_error);

  MultiCurve crossing{{{mark("a1"), 1.0}, {mark("b1"), 1.0}}};
  CHECK_THROWS_WITH_AS(crossing.validate(rep), "multicurve components are not disjoint",
                       validation_error);

  MultiCurve non_simple{{{CurveClass::from_word("w", "a1 b1 A1 b1"), 1.0}}};
  CHECK_THROWS_WITH_AS(non_simple.validate(rep), "multicurve component is not simple",
                       validation_error);

  CHECK_THROWS_AS(ok.scaled(0.0), validation_error);
  CHECK_THROWS_AS(ok.scaled(-1.0), validation_error);
  MultiCurve half = ok.scaled(0.5);
  CHECK(half.components[0].second == doctest::Approx(0.5));
  CHECK(half.components[1].second == doctest::Approx(0.25));
}

TEST_CASE("weighted intersection is linear in the weights") {
  // reference surface drawn from the seeded random family
  FenchelNielsen fn{{2.0736372805850607, 2.446277146691627, 1.1744389671253568},
                    {-0.8257116032956597, -0.3348287490733042, 0.9281524331875282}};
  FuchsianRep rep = holonomy_from_fn(fn, topo());
  CHECK(intersection_number(rep, topo().pants_curve(0), mark("b1b2")) == 1);
  CHECK(intersection_number(rep, topo().pants_curve(1), mark("b1b2")) == 1);
  CHECK(intersection_number(rep, topo().pants_curve(2), mark("b1b2")) == 2);

  double w1 = 4.621953749493951, w2 = 0.7595226973839173, w3 = 3.564378543161802;
  MultiCurve l{{{topo().pants_curve(0), w1},
                {topo().pants_curve(1), w2},
                {topo().pants_curve(2), w3}}};
  double got = lamination_intersection(rep, l, mark("b1b2"));
  CHECK(std::abs(got - (w1 + w2 + 2 * w3)) < 1e-9);

  // scaling the lamination scales the pairing
  double doubled = lamination_intersection(rep, l.scaled(2.0), mark("b1b2"));
  CHECK(std::abs(doubled - 2 * got) < 1e-9);

  // empty lamination pairs to zero
  CHECK(lamination_intersection(rep, MultiCurve{}, mark("b1b2")) == 0.0);
}
