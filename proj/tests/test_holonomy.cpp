#include "doctest.h"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hypgeo/errors.hpp"
#include "hypgeo/holonomy.hpp"
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

Word random_reduced_word(std::mt19937_64& g, int len) {
  Word w;
  int last = 0;
  for (int i = 0; i < len; ++i) {
    int tok;
    do {
      tok = 1 + static_cast<int>(g() % 4);
      if (g() & 1) tok = -tok;
    } while (tok == -last);
    w.push_back(tok);
    last = tok;
  }
  return w;
}

// Reference length spectrum at lengths (1.5,1.5,1.5), twists (0.2,-0.4,0.6),
// computed with a 50-digit multiprecision build of the same hexagon recipe.
struct Pin {
  const char* name;
  double L;
};
constexpr Pin kBasePins[] = {
    {"a1", 1.5},
    {"b1", 2.2179493364718574},
    {"a2", 1.5},
    {"b2", 2.1689675985891987},
    {"c3", 1.5},
    {"a1b1", 2.4920637055957302},
    {"a2b2", 2.8985890172895507},
    {"a1a2", 7.7305257317323844},
    {"b1b2", 8.8645645928353423},
};

// Same construction at twists (0,0,0); the two handles become isometric.
constexpr Pin kZeroTwistPins[] = {
    {"a1", 1.5},
    {"b1", 2.1769013925577626},
    {"a2", 1.5},
    {"b2", 2.1769013925577626},
    {"c3", 1.5},
    {"a1b1", 2.6148796019321025},
    {"a2b2", 2.6148796019321025},
    {"a1a2", 7.8316376452429843},
    {"b1b2", 9.3197911084921962},
};

}  // namespace

TEST_CASE("word parsing and reduction") {
  Word w = parse_word("a1 b1 A1 B1");
  CHECK(w == Word{1, 2, -1, -2});
  CHECK(word_to_string(w) == "a1 b1 A1 B1");
  CHECK(freely_reduce({1, -1}).empty());
  CHECK(freely_reduce({1, 2, -2, -1, 3}) == Word{3});
  CHECK(cyclically_reduce({1, 2, -1}) == Word{2});
  CHECK(invert_word({1, 2}) == Word{-2, -1});
  CHECK(conjugate_word({3}, {1, 2}) == Word{3, 1, 2, -3});
  CHECK(conjugate_word({-1}, {1, 2}) == Word{2, -1});  // leading pair cancels
  CHECK_THROWS_AS(parse_word("a1 q7"), validation_error);
  CHECK_THROWS_AS(parse_word("a9"), validation_error);
  CHECK_THROWS_AS(CurveClass::from_word("triv", "a1 A1"), validation_error);
}

TEST_CASE("pants graph backbone") {
  const PantsGraph& t = topo();
  t.validate();
  CHECK(t.genus == 2);
  CHECK(t.edges.size() == 3);
  CHECK(t.pants_curve(0).name == "c1");
  CHECK(t.pants_curve(1).name == "c2");
  CHECK(t.pants_curve(2).name == "c3");
  CHECK_THROWS_AS(t.pants_curve(3), validation_error);

  // matching is up to cyclic rotation and inversion
  CHECK(t.match_pants_curve(CurveClass::from_word("x", "a1")) == 0);
  CHECK(t.match_pants_curve(CurveClass::from_word("x", "A1")) == 0);
  CHECK(t.match_pants_curve(CurveClass::from_word("x", "b1 A1 B1 a1")) == 2);
  CHECK(t.match_pants_curve(CurveClass::from_word("x", "b1 a1 B1 A1")) == 2);
  CHECK(!t.match_pants_curve(CurveClass::from_word("x", "a1 b1")));

  // the marking set contains all three pants curves
  CHECK(topo().match_pants_curve(mark("a1")) == 0);
  CHECK(topo().match_pants_curve(mark("a2")) == 1);
  CHECK(topo().match_pants_curve(mark("c3")) == 2);
  CHECK(marking_set().size() == 9);
}

TEST_CASE("Fenchel-Nielsen validation") {
  FenchelNielsen short_lengths{{1.5, 1.5}, {0, 0, 0}};
  CHECK_THROWS_WITH_AS(short_lengths.validate(topo()),
                       "Fenchel-Nielsen tuple needs 3g-3 lengths and twists",
                       validation_error);
  FenchelNielsen zero_length{{0.0, 1.5, 1.5}, {0, 0, 0}};
  CHECK_THROWS_WITH_AS(zero_length.validate(topo()),
                       "Fenchel-Nielsen lengths must be positive", validation_error);
  FenchelNielsen neg_length{{1.5, -2.0, 1.5}, {0, 0, 0}};
  CHECK_THROWS_AS(neg_length.validate(topo()), validation_error);
  double inf = std::numeric_limits<double>::infinity();
  FenchelNielsen inf_twist{{1.5, 1.5, 1.5}, {0, inf, 0}};
  CHECK_THROWS_AS(inf_twist.validate(topo()), validation_error);
  FenchelNielsen short_twists{{1.5, 1.5, 1.5}, {0, 0}};
  CHECK_THROWS_AS(holonomy_from_fn(short_twists, topo()), validation_error);
}

TEST_CASE("construction meets the relator and recovers pants lengths") {
  FenchelNielsen fn{{1.5, 1.5, 1.5}, {0, 0, 0}};
  FuchsianRep rep = holonomy_from_fn(fn, topo());
  CHECK(rep.relator_residual() < 1e-9);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(curve_length(rep, topo().pants_curve(j)) - fn.lengths[j]) < 1e-9);
  CHECK(rep.has_fn());
  CHECK(rep.residual_method() == "dense");
}

TEST_CASE("marking spectrum matches the multiprecision reference") {
  FuchsianRep rep = holonomy_from_fn({{1.5, 1.5, 1.5}, {0.2, -0.4, 0.6}}, topo());
  for (const Pin& p : kBasePins)
    CHECK(std::abs(curve_length(rep, mark(p.name)) - p.L) < 1e-11);

  FuchsianRep rep0 = holonomy_from_fn({{1.5, 1.5, 1.5}, {0, 0, 0}}, topo());
  for (const Pin& p : kZeroTwistPins)
    CHECK(std::abs(curve_length(rep0, mark(p.name)) - p.L) < 1e-11);
}

TEST_CASE("huge twists keep exact lengths through the factored images") {
  // reference values from the same multiprecision oracle at 800+ digits;
  // dense 2x2 products would overflow or lose everything to cancellation
  FuchsianRep rep = holonomy_from_fn({{1.5, 1.5, 1.5}, {1300.2, -0.4, 900.6}}, topo());
  CHECK(rep.relator_residual() < 1e-9);
  CHECK(rep.residual_method() == "skeleton");
  auto rel = [&](const char* n, double want) {
    return std::abs(curve_length(rep, mark(n)) - want) / want;
  };
  CHECK(rel("b1", 1301.4237102592835) < 1e-12);
  CHECK(rel("a2b2", 2.8985890172895507) < 1e-12);
  CHECK(rel("a1a2", 1805.3048978846210) < 1e-12);
  CHECK(rel("b1b2", 3104.1178037137925) < 1e-12);
  CHECK(std::abs(curve_length(rep, mark("a1")) - 1.5) < 1e-12);
  CHECK(std::abs(curve_length(rep, mark("c3")) - 1.5) < 1e-12);
}

TEST_CASE("twisting preserves the lengths of all pants curves") {
  std::mt19937_64 g(31);
  for (double s : {0.7, -2.3, 10.0, 137.0}) {
    for (int j = 0; j < 3; ++j) {
      FenchelNielsen fn{{1.3, 2.1, 0.9}, {unif(g, -1, 1), unif(g, -1, 1), unif(g, -1, 1)}};
      fn.twists[j] += s;
      FuchsianRep rep = holonomy_from_fn(fn, topo());
      for (int k = 0; k < 3; ++k)
        CHECK(std::abs(curve_length(rep, topo().pants_curve(k)) - fn.lengths[k]) < 1e-9);
    }
  }
}

TEST_CASE("length spectrum is continuous in the coordinates") {
  FenchelNielsen fn{{1.5, 1.5, 1.5}, {0.2, -0.4, 0.6}};
  FuchsianRep rep = holonomy_from_fn(fn, topo());
  std::vector<double> base;
  for (const CurveClass& c : marking_set()) base.push_back(curve_length(rep, c));

  for (int coord = 0; coord < 6; ++coord) {
    FenchelNielsen fp = fn;
    (coord < 3 ? fp.lengths[coord] : fp.twists[coord - 3]) += 1e-6;
    FuchsianRep repp = holonomy_from_fn(fp, topo());
    for (size_t k = 0; k < marking_set().size(); ++k)
      CHECK(std::abs(curve_length(repp, marking_set()[k]) - base[k]) < 1e-3);
  }
}

TEST_CASE("curve length is a class function") {
  FuchsianRep rep = holonomy_from_fn({{1.2, 1.9, 0.8}, {0.3, 0.1, -0.5}}, topo());
  std::mt19937_64 g(32);
  for (int i = 0; i < 50; ++i) {
    Word w = random_reduced_word(g, 1 + static_cast<int>(g() % 4));
    if (cyclically_reduce(w).empty()) continue;
    Word h = random_reduced_word(g, 1 + static_cast<int>(g() % 3));
    CurveClass c{"w", cyclically_reduce(w)};
    CurveClass conj{"hwh", cyclically_reduce(conjugate_word(h, w))};
    CurveClass inv{"winv", cyclically_reduce(invert_word(w))};
    double L = curve_length(rep, c);
    CHECK(std::abs(curve_length(rep, conj) - L) < 1e-10);
    CHECK(std::abs(curve_length(rep, inv) - L) < 1e-10);
  }
}

TEST_CASE("word evaluation agrees between factored and dense paths") {
  FuchsianRep rep = holonomy_from_fn({{1.5, 1.5, 1.5}, {0.2, -0.4, 0.6}}, topo());
  std::array<Isometry2, 4> imgs;
  for (int k = 0; k < 4; ++k) imgs[k] = rep.image(k);
  std::mt19937_64 g(33);
  for (int i = 0; i < 30; ++i) {
    Word w = random_reduced_word(g, 1 + static_cast<int>(g() % 5));
    Isometry2 dense = Isometry2::identity();
    for (int t : w) {
      int k = std::abs(t) - 1;
      dense = compose(dense, t > 0 ? imgs[k] : inverse(imgs[k]));
    }
    CHECK(sm_dist_projective(rep.evaluate(w), dense) < 1e-8);
  }
}

TEST_CASE("non-geodesic classes are rejected") {
  // a hand-built non-faithful assignment: one generator elliptic
  double th = 0.9;
  std::array<Isometry2, 4> imgs = {
      Isometry2::from(std::cos(th), std::sin(th), -std::sin(th), std::cos(th)),
      Isometry2::from(std::exp(0.5), 0, 0, std::exp(-0.5)),
      Isometry2::from(2, 1, 1, 1),
      Isometry2::from(1, 1, 0, 1),
  };
  FuchsianRep rep = FuchsianRep::from_images(imgs, topo(), 0.0);
  CHECK_THROWS_WITH_AS(curve_length(rep, mark("a1")), "not realized by a geodesic",
                       validation_error);
  CHECK_THROWS_AS(curve_length(rep, mark("b2")), validation_error);  // parabolic
  CHECK(rep.word_class({1}) == IsomClass::elliptic);
  CHECK(rep.word_class({2}) == IsomClass::hyperbolic);
  CHECK(rep.word_class({4}) == IsomClass::parabolic);
  CHECK(rep.word_class({1, -1}) == IsomClass::identity);
}

TEST_CASE("diagnostics pass on valid input and flag corruption") {
  FuchsianRep rep = holonomy_from_fn({{1.5, 1.7, 1.3}, {0.2, -0.4, 0.6}}, topo());
  RepDiagnostics d = validate_rep(rep);
  CHECK(d.ok);
  CHECK(d.systole_ok);
  CHECK(d.relator_residual < 1e-9);
  CHECK(d.pants_length_error < 1e-9);
  CHECK(d.min_pants_length == doctest::Approx(1.3));
  CHECK(d.max_pants_length == doctest::Approx(1.7));
  CHECK(d.min_short_word_length >= 1e-4);
  CHECK(d.min_short_word_length <= 1.3 + 1e-9);

  // near-degenerate pants length: the frame scale grows like e^{d(l)} with
  // d(l) ~ 2 log(1/l), so no fixed-precision evaluation can certify the
  // relator there; the construction refuses loudly instead of flagging later
  CHECK_THROWS_AS(holonomy_from_fn({{1e-6, 1.5, 1.5}, {0, 0, 0}}, topo()), rep_error);
  try {
    holonomy_from_fn({{1e-6, 1.5, 1.5}, {0, 0, 0}}, topo());
  } catch (const rep_error& e) {
    CHECK(e.residual > 1e-9);  // the failure carries the measured residual
  }

  // the systole heuristic itself, on a hand-built thin assignment
  std::array<Isometry2, 4> thin;
  for (int k = 0; k < 4; ++k) thin[k] = rep.image(k);
  thin[0] = Isometry2::from(std::exp(2.5e-5), 0, 0, std::exp(-2.5e-5));
  RepDiagnostics dt = validate_rep(FuchsianRep::from_images(thin, topo(), 1.0));
  CHECK(!dt.systole_ok);
  CHECK(!dt.ok);
  CHECK(dt.min_short_word_length <= 5e-5 * (1 + 1e-9));

  // hand-corrupted image: the stored residual is what the diagnostics see
  std::array<Isometry2, 4> imgs;
  for (int k = 0; k < 4; ++k) imgs[k] = rep.image(k);
  imgs[1] = compose(imgs[1], Isometry2::from(1, 0.37, 0, 1));
  Word rel = parse_word(topo().relator_str);
  Isometry2 relm = Isometry2::identity();
  for (int t : rel) {
    int k = std::abs(t) - 1;
    relm = compose(relm, t > 0 ? imgs[k] : inverse(imgs[k]));
  }
  double res = frobenius_dist(relm, Isometry2::identity());
  CHECK(res > 1e-3);
  RepDiagnostics dc = validate_rep(FuchsianRep::from_images(imgs, topo(), res));
  CHECK(dc.relator_residual > 1e-3);
  CHECK(!dc.ok);
}

TEST_CASE("non-finite coordinates are rejected up front") {
  CHECK_THROWS_AS(
      holonomy_from_fn(
          {{1.5, 1.5, 1.5}, {0.2, -0.4, std::numeric_limits<double>::quiet_NaN()}},
          topo()),
      validation_error);
}

TEST_CASE("random tuples construct cleanly across the sampled box") {
  std::mt19937_64 g(34);
  for (int i = 0; i < 25; ++i) {
    FenchelNielsen fn;
    for (int j = 0; j < 3; ++j) fn.lengths.push_back(unif(g, 0.5, 3.0));
    for (int j = 0; j < 3; ++j) fn.twists.push_back(unif(g, -1.0, 1.0));
    FuchsianRep rep = holonomy_from_fn(fn, topo());
    CHECK(rep.relator_residual() < 1e-9);
    double perr = 0;
    for (int j = 0; j < 3; ++j)
      perr = std::max(perr,
                      std::abs(curve_length(rep, topo().pants_curve(j)) - fn.lengths[j]));
    CHECK(perr < 1e-9);
  }
}
