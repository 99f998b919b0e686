#include "doctest.h"

#include <cmath>
#include <random>

#include "hypgeo/errors.hpp"
#include "hypgeo/moebius.hpp"
#include "hypgeo/rng.hpp"

using namespace hypgeo;

namespace {

Isometry2 random_isometry(std::mt19937_64& g) {
  for (;;) {
    double a = unif(g, -2, 2), b = unif(g, -2, 2);
    double c = unif(g, -2, 2), d = unif(g, -2, 2);
    if (a * d - b * c > 0.05) return Isometry2::from(a, b, c, d);
  }
}

Isometry2 diag(double s) { return Isometry2::from(std::exp(s / 2), 0, 0, std::exp(-s / 2)); }

}  // namespace

TEST_CASE("normalization: det 1 and nonnegative trace") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 200; ++i) {
    Isometry2 m = random_isometry(g);
    CHECK(std::abs(m.a * m.d - m.b * m.c - 1.0) < 1e-12);
    CHECK(m.a + m.d >= 0);
  }
  CHECK_THROWS_AS(Isometry2::from(1, 0, 0, -1), validation_error);
  CHECK_THROWS_AS(Isometry2::from(0, 0, 0, 0), validation_error);
}

TEST_CASE("classification by trace") {
  CHECK(classify_isometry(Isometry2::identity()) == IsomClass::identity);
  CHECK(classify_isometry(diag(1.0)) == IsomClass::hyperbolic);
  CHECK(classify_isometry(Isometry2::from(1, 1, 0, 1)) == IsomClass::parabolic);
  double th = 0.4;
  Isometry2 rot = Isometry2::from(std::cos(th), std::sin(th), -std::sin(th), std::cos(th));
  CHECK(classify_isometry(rot) == IsomClass::elliptic);
  CHECK(to_string(IsomClass::hyperbolic) == "hyperbolic");
}

TEST_CASE("translation length closed forms") {
  CHECK(translation_length(diag(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  // trace 3 gives 2 arccosh(3/2)
  CHECK(std::abs(translation_length(Isometry2::from(2, 1, 1, 1)) -
                 1.9248473002384139) < 1e-12);
  CHECK_THROWS_WITH_AS(translation_length(Isometry2::from(1, 1, 0, 1)),
                       "no positive translation length", validation_error);
  CHECK_THROWS_AS(translation_length(Isometry2::identity()), validation_error);
}

TEST_CASE("translation length is a conjugacy and inversion invariant") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 50; ++i) {
    Isometry2 m = diag(unif(g, 0.2, 4.0));
    Isometry2 h = random_isometry(g);
    Isometry2 conj = compose(compose(h, m), inverse(h));
    double L = translation_length(m);
    CHECK(std::abs(translation_length(conj) - L) < 1e-10);
    CHECK(std::abs(translation_length(inverse(conj)) - L) < 1e-10);
  }
}

TEST_CASE("translation length of powers is linear") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 20; ++i) {
    Isometry2 h = random_isometry(g);
    Isometry2 m = compose(compose(h, diag(unif(g, 0.3, 2.0))), inverse(h));
    double L = translation_length(m);
    Isometry2 p = m;
    for (int n = 2; n <= 5; ++n) {
      p = compose(p, m);
      CHECK(std::abs(translation_length(p) - n * L) < 1e-9);
    }
  }
}

TEST_CASE("fixed points and axes") {
  auto [r0, a0] = fixed_points(diag(1.0));
  CHECK(!r0.infinite);
  CHECK(r0.value == doctest::Approx(0.0));
  CHECK(a0.infinite);

  // roots of x^2 - x - 1: the golden ratio pair, attracting at (1+sqrt 5)/2
  auto [r1, a1] = fixed_points(Isometry2::from(2, 1, 1, 1));
  CHECK(std::abs(r1.value - (1 - std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(std::abs(a1.value - (1 + std::sqrt(5.0)) / 2) < 1e-12);

  CHECK_THROWS_AS(fixed_points(Isometry2::from(1, 1, 0, 1)), validation_error);

  // conjugating by z -> z + 1 shifts both endpoints by 1
  Isometry2 sh = Isometry2::from(1, 1, 0, 1);
  Isometry2 m = Isometry2::from(2, 1, 1, 1);
  auto [r2, a2] = fixed_points(compose(compose(sh, m), inverse(sh)));
  CHECK(std::abs(r2.value - (r1.value + 1)) < 1e-10);
  CHECK(std::abs(a2.value - (a1.value + 1)) < 1e-10);

  GeodesicLine ax = axis(diag(2.0));
  bool has_inf = ax.e1.infinite || ax.e2.infinite;
  double fin = ax.e1.infinite ? ax.e2.value : ax.e1.value;
  CHECK(has_inf);
  CHECK(std::abs(fin) < 1e-14);
}

TEST_CASE("boundary action") {
  Isometry2 m = Isometry2::from(2, 1, 1, 1);
  BoundaryPoint img = mobius_boundary(m, BoundaryPoint::at_infinity());
  CHECK(!img.infinite);
  CHECK(img.value == doctest::Approx(2.0));  // a/c
  BoundaryPoint pole = mobius_boundary(m, BoundaryPoint::at(-1.0));
  CHECK(pole.infinite);
  CHECK(same_point(BoundaryPoint::at_infinity(), pole));
  CHECK(!same_point(BoundaryPoint::at(1.0), BoundaryPoint::at(2.0)));
}

TEST_CASE("geodesic linking") {
  auto line = [](double p, double q) {
    return GeodesicLine{BoundaryPoint::at(p), BoundaryPoint::at(q)};
  };
  GeodesicLine vert{BoundaryPoint::at(0), BoundaryPoint::at_infinity()};
  CHECK(geodesics_link(vert, line(-1, 1)));
  CHECK(!geodesics_link(line(0, 1), line(2, 3)));
  CHECK(geodesics_link(line(0, 2), line(1, 3)));
  CHECK(!geodesics_link(line(0, 3), line(1, 2)));  // nested, no crossing
  CHECK_THROWS_WITH_AS(geodesics_link(line(0, 1), line(1, 2)),
                       "degenerate configuration", validation_error);
}

TEST_CASE("linking is symmetric and isometry-invariant") {
  std::mt19937_64 g(14);
  for (int i = 0; i < 100; ++i) {
    double e[4] = {unif(g, -5, 5), unif(g, -5, 5), unif(g, -5, 5), unif(g, -5, 5)};
    bool distinct = true;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (std::abs(e[a] - e[b]) < 1e-6) distinct = false;
    if (!distinct) continue;
    GeodesicLine u{BoundaryPoint::at(e[0]), BoundaryPoint::at(e[1])};
    GeodesicLine v{BoundaryPoint::at(e[2]), BoundaryPoint::at(e[3])};
    bool lk = geodesics_link(u, v);
    CHECK(geodesics_link(v, u) == lk);
    Isometry2 h = random_isometry(g);
    GeodesicLine hu{mobius_boundary(h, u.e1), mobius_boundary(h, u.e2)};
    GeodesicLine hv{mobius_boundary(h, v.e1), mobius_boundary(h, v.e2)};
    CHECK(geodesics_link(hu, hv) == lk);
  }
}

TEST_CASE("normalizer sends the pair to (0, infinity)") {
  std::mt19937_64 g(15);
  for (int i = 0; i < 50; ++i) {
    double p = unif(g, -4, 4), q = unif(g, -4, 4);
    if (std::abs(p - q) < 1e-3) continue;
    Isometry2 F = normalizer(BoundaryPoint::at(p), BoundaryPoint::at(q));
    BoundaryPoint zp = mobius_boundary(F, BoundaryPoint::at(p));
    BoundaryPoint zq = mobius_boundary(F, BoundaryPoint::at(q));
    CHECK(!zp.infinite);
    CHECK(std::abs(zp.value) < 1e-9);
    CHECK(zq.infinite);
  }
  Isometry2 F = normalizer(BoundaryPoint::at_infinity(), BoundaryPoint::at(0));
  CHECK(mobius_boundary(F, BoundaryPoint::at_infinity()).value == doctest::Approx(0.0));
  CHECK(mobius_boundary(F, BoundaryPoint::at(0)).infinite);
  CHECK_THROWS_AS(normalizer(BoundaryPoint::at(1), BoundaryPoint::at(1)),
                  validation_error);
}

TEST_CASE("Minkowski pairing is bilinear and symmetric") {
  std::mt19937_64 g(16);
  for (int i = 0; i < 100; ++i) {
    MinkowskiVec u{unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2)};
    MinkowskiVec v{unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2)};
    MinkowskiVec w{unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2), unif(g, -2, 2)};
    double s = unif(g, -3, 3);
    CHECK(std::abs(mink(u, v) - mink(v, u)) < 1e-12);
    CHECK(std::abs(mink(u + w, v) - mink(u, v) - mink(w, v)) < 1e-12);
    CHECK(std::abs(mink(s * u, v) - s * mink(u, v)) < 1e-11);
    CHECK(std::abs(mink(u - u, v)) < 1e-12);
  }
  MinkowskiVec e0{1, 0, 0, 0}, e3{0, 0, 0, 1};
  CHECK(mink(e0, e0) == doctest::Approx(-1.0));
  CHECK(mink(e3, e3) == doctest::Approx(1.0));
  CHECK(mink(e0, e3) == doctest::Approx(0.0));
}

TEST_CASE("scaled matrices round-trip plain isometries") {
  std::mt19937_64 g(17);
  for (int i = 0; i < 50; ++i) {
    Isometry2 m = random_isometry(g);
    Isometry2 back = sm_to_isometry(sm_from(m));
    CHECK(frobenius_dist(m, back) < 1e-12);
  }
}

TEST_CASE("scaled product and inverse agree with the dense forms") {
  std::mt19937_64 g(18);
  for (int i = 0; i < 50; ++i) {
    Isometry2 x = random_isometry(g), y = random_isometry(g);
    ScaledMat p = sm_mul(sm_from(x), sm_from(y));
    CHECK(sm_dist_projective(p, compose(x, y)) < 1e-11);
    CHECK(sm_dist_projective(sm_inv(sm_from(x)), inverse(x)) < 1e-12);
  }
}

TEST_CASE("scaled traces survive magnitudes far beyond double range") {
  // R(4000) has entries e^(+-2000), representable only with the split scale
  ScaledMat big = sm_twist(4000.0);
  auto [t, logs] = sm_trace(big);
  CHECK(std::isfinite(t));
  CHECK(std::abs(translation_length_scaled(t, logs) - 4000.0) < 1e-9);
  CHECK(classify_scaled_trace(t, logs) == IsomClass::hyperbolic);
  CHECK_THROWS_AS(sm_to_isometry(big), rep_error);

  ScaledMat cancel = sm_mul(big, sm_twist(-4000.0));
  CHECK(sm_dist_projective(cancel, Isometry2::identity()) < 1e-9);
}

TEST_CASE("factored words merge twists exactly") {
  FactorList fs;
  fpush(fs, Factor::twist(1500.0));
  fpush(fs, Factor::twist(-1499.25));
  // adjacent diagonals merge by parameter arithmetic, no overflow ever forms
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].diag);
  CHECK(fs[0].s == doctest::Approx(0.75));

  // exact cancellation drops the factor entirely
  fpush(fs, Factor::twist(-0.75));
  CHECK(fs.empty());

  // fmerge collapses adjacent same-kind factors without changing the value
  std::mt19937_64 g(19);
  Isometry2 m1 = random_isometry(g), m2 = random_isometry(g);
  FactorList raw = {Factor::dense(sm_from(m1)), Factor::dense(sm_from(m2)),
                    Factor::twist(0.5), Factor::twist(0.25)};
  FactorList merged = fmerge(raw);
  REQUIRE(merged.size() == 2);
  CHECK(sm_dist_projective(feval(merged),
                           compose(compose(m1, m2), sm_to_isometry(sm_twist(0.75)))) <
        1e-11);
}

TEST_CASE("factored inverse and evaluation") {
  std::mt19937_64 g(20);
  Isometry2 m1 = random_isometry(g), m2 = random_isometry(g);
  FactorList fs;
  fpush(fs, Factor::dense(sm_from(m1)));
  fpush(fs, Factor::twist(0.8));
  fpush(fs, Factor::dense(sm_from(m2)));

  Isometry2 dense =
      compose(compose(m1, sm_to_isometry(sm_twist(0.8))), m2);
  double peak = 0;
  CHECK(sm_dist_projective(feval(fs, &peak), dense) < 1e-11);
  CHECK(peak >= 0);

  FactorList inv = finv(fs);
  CHECK(sm_dist_projective(feval(inv), inverse(dense)) < 1e-11);

  // product of a list and its inverse evaluates to the identity
  FactorList both = fs;
  fappend(both, inv);
  CHECK(sm_dist_projective(feval(both), Isometry2::identity()) < 1e-10);
}

TEST_CASE("factored traces match dense traces and allow cyclic rotation") {
  std::mt19937_64 g(21);
  for (int i = 0; i < 30; ++i) {
    Isometry2 m1 = random_isometry(g), m2 = random_isometry(g);
    double s = unif(g, -3, 3);
    FactorList fs;
    fpush(fs, Factor::dense(sm_from(m1)));
    fpush(fs, Factor::twist(s));
    fpush(fs, Factor::dense(sm_from(m2)));

    Isometry2 dense = compose(compose(m1, sm_to_isometry(sm_twist(s))), m2);
    auto [t, logs] = ftrace(fs);
    double tr_dense = dense.a + dense.d;
    CHECK(std::abs(std::abs(t) * std::exp(logs) - std::abs(tr_dense)) <
          1e-10 * std::max(1.0, std::abs(tr_dense)));

    // trace is invariant under rotating the factor list
    FactorList rot;
    fpush(rot, Factor::twist(s));
    fpush(rot, Factor::dense(sm_from(m2)));
    fpush(rot, Factor::dense(sm_from(m1)));
    auto [t2, logs2] = ftrace(rot);
    CHECK(std::abs(std::abs(t) * std::exp(logs) - std::abs(t2) * std::exp(logs2)) <
          1e-10 * std::max(1.0, std::abs(tr_dense)));
  }
}
