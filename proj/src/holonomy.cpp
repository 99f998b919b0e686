#include "hypgeo/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypgeo/errors.hpp"

namespace hypgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEpsRel = 1e-9;
// Direct relator evaluation is trusted only while the peak intermediate
// log-scale keeps eps * e^peak well under the residual tolerance: the exact
// product is the identity, so cancellation error scales with the largest
// intermediate. Evaluated in long double (eps ~ 1e-19), peak 11 leaves a
// floor near 3e-11 against the 1e-9 gate.
constexpr double kDensePeak = 11.0;
constexpr int kNumGens = 4;  // a1 b1 a2 b2
}  // namespace

Word parse_word(const std::string& s) {
  Word w;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (tok.size() != 2 || (tok[1] != '1' && tok[1] != '2'))
      throw validation_error("bad word token: " + tok);
    char c = tok[0];
    bool inv = (c == 'A' || c == 'B');
    char low = inv ? static_cast<char>(c - 'A' + 'a') : c;
    if (low != 'a' && low != 'b') throw validation_error("bad word token: " + tok);
    int handle = tok[1] - '1';           // 0 or 1
    int gen = 2 * handle + (low == 'b' ? 1 : 0);
    w.push_back(inv ? -(gen + 1) : gen + 1);
  }
  return w;
}

std::string word_to_string(const Word& w) {
  static const char* names[] = {"a1", "b1", "a2", "b2"};
  static const char* inv_names[] = {"A1", "B1", "A2", "B2"};
  std::string out;
  for (int t : w) {
    if (!out.empty()) out += ' ';
    int g = std::abs(t) - 1;
    if (g < 0 || g >= kNumGens) throw validation_error("word token out of range");
    out += (t > 0 ? names[g] : inv_names[g]);
  }
  return out;
}

Word freely_reduce(Word w) {
  Word out;
  for (int t : w) {
    if (t == 0) throw validation_error("word token out of range");
    if (!out.empty() && out.back() == -t)
      out.pop_back();
    else
      out.push_back(t);
  }
  return out;
}

Word cyclically_reduce(Word w) {
  w = freely_reduce(std::move(w));
  while (w.size() >= 2 && w.front() == -w.back()) {
    w.erase(w.begin());
    w.pop_back();
    w = freely_reduce(std::move(w));
  }
  return w;
}

Word invert_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
  return out;
}

Word conjugate_word(const Word& h, const Word& w) {
  Word out = h;
  out.insert(out.end(), w.begin(), w.end());
  Word hi = invert_word(h);
  out.insert(out.end(), hi.begin(), hi.end());
  return freely_reduce(std::move(out));
}

CurveClass CurveClass::from_word(const std::string& name, const std::string& word_str) {
  CurveClass c;
  c.name = name;
  c.word = cyclically_reduce(parse_word(word_str));
  if (c.word.empty()) throw validation_error("curve class word is trivial: " + name);
  return c;
}

PantsGraph PantsGraph::genus2_default() {
  PantsGraph g;
  g.genus = 2;
  g.edges = {{{End{0, 0}, End{0, 1}}},   // c1: handle curve of pants 0
             {{End{1, 0}, End{1, 1}}},   // c2: handle curve of pants 1
             {{End{0, 2}, End{1, 2}}}};  // c3: separating curve joining them
  g.curve_names = {"c1", "c2", "c3"};
  g.curve_word_strs = {"a1", "a2", "a1 b1 A1 B1"};
  return g;
}

void PantsGraph::validate() const {
  if (genus != 2)
    throw validation_error("only the genus-2 pants decomposition is implemented");
  size_t n_curves = 3 * genus - 3, n_nodes = 2 * genus - 2;
  if (edges.size() != n_curves || curve_names.size() != n_curves ||
      curve_word_strs.size() != n_curves)
    throw validation_error("pants graph needs 3g-3 gluing curves");
  std::vector<int> degree(n_nodes, 0);
  for (const auto& e : edges)
    for (const auto& end : e) {
      if (end.node < 0 || end.node >= static_cast<int>(n_nodes))
        throw validation_error("pants graph edge references missing node");
      ++degree[end.node];
    }
  for (int d : degree)
    if (d != 3) throw validation_error("every pair of pants needs 3 boundary ends");
  for (const auto& s : curve_word_strs)
    if (cyclically_reduce(parse_word(s)).empty())
      throw validation_error("pants curve word is trivial");
  if (freely_reduce(parse_word(relator_str)).size() != 4u * genus)
    throw validation_error("relator word is malformed");
}

CurveClass PantsGraph::pants_curve(int j) const {
  if (j < 0 || j >= static_cast<int>(edges.size()))
    throw validation_error("pants curve index out of range");
  return CurveClass::from_word(curve_names[j], curve_word_strs[j]);
}

namespace {
bool cyclic_equal(const Word& u, const Word& v) {
  if (u.size() != v.size()) return false;
  if (u.empty()) return true;
  for (size_t r = 0; r < u.size(); ++r) {
    bool ok = true;
    for (size_t i = 0; i < u.size() && ok; ++i)
      ok = (u[(i + r) % u.size()] == v[i]);
    if (ok) return true;
  }
  return false;
}
}  // namespace

std::optional<int> PantsGraph::match_pants_curve(const CurveClass& c) const {
  Word w = cyclically_reduce(c.word);
  for (size_t j = 0; j < curve_word_strs.size(); ++j) {
    Word p = cyclically_reduce(parse_word(curve_word_strs[j]));
    if (cyclic_equal(w, p) || cyclic_equal(w, cyclically_reduce(invert_word(p))))
      return static_cast<int>(j);
  }
  return std::nullopt;
}

void FenchelNielsen::validate(const PantsGraph& topo) const {
  size_t n = 3 * topo.genus - 3;
  if (lengths.size() != n || twists.size() != n)
    throw validation_error("Fenchel-Nielsen tuple needs 3g-3 lengths and twists");
  for (double l : lengths)
    if (!(l > 0) || !std::isfinite(l))
      throw validation_error("Fenchel-Nielsen lengths must be positive");
  for (double t : twists)
    if (!std::isfinite(t)) throw validation_error("Fenchel-Nielsen twists must be finite");
}

const std::vector<CurveClass>& marking_set() {
  static const std::vector<CurveClass> mark = [] {
    std::vector<CurveClass> m;
    m.push_back(CurveClass::from_word("a1", "a1"));
    m.push_back(CurveClass::from_word("b1", "b1"));
    m.push_back(CurveClass::from_word("a2", "a2"));
    m.push_back(CurveClass::from_word("b2", "b2"));
    m.push_back(CurveClass::from_word("c3", "a1 b1 A1 B1"));
    m.push_back(CurveClass::from_word("a1b1", "a1 b1"));
    m.push_back(CurveClass::from_word("a2b2", "a2 b2"));
    m.push_back(CurveClass::from_word("a1a2", "a1 a2"));
    m.push_back(CurveClass::from_word("b1b2", "b1 b2"));
    return m;
  }();
  return mark;
}

// ---------------------------------------------------------------------------
// Construction internals
// ---------------------------------------------------------------------------
namespace {

// Distance between the two boundary circles of the one-holed torus with
// handle curve length l_same and boundary length l_opp, from the
// right-angled-hexagon relations of the underlying pair of pants.
double hexagon_d(double l_same, double l_opp) {
  double sh = std::sinh(l_same / 2), ch = std::cosh(l_same / 2);
  double val = (std::cosh(l_opp / 2) + ch * ch) / (sh * sh);
  return std::acosh(val);
}

// Unit-determinant isometry carrying the handle-curve axis (0, inf) across
// the handle at perpendicular distance d.
ScaledMat nmat(double d) {
  double t = std::tanh(d / 2), u = 1.0 / t;
  double s = std::sqrt(u - t);
  return sm_make(1.0 / s, -t / s, -1.0 / s, u / s);
}

// Boundary fixed points (repelling, attracting) of a hyperbolic ScaledMat.
std::pair<double, double> sm_fixed_points(const ScaledMat& g) {
  double a = g.m00, b = g.m01, c = g.m10, d = g.m11;
  if (std::abs(c) < 1e-300) {
    double p = b / (d - a);
    if (std::abs(a) > std::abs(d)) return {p, kInf};
    return {kInf, p};
  }
  double disc = std::sqrt((d - a) * (d - a) + 4 * b * c);
  double x1 = ((a - d) + disc) / (2 * c);
  double x2 = ((a - d) - disc) / (2 * c);
  // multipliers are reciprocal: the larger |c x + d| marks the attractor
  if (std::abs(c * x1 + d) > std::abs(c * x2 + d)) return {x2, x1};
  return {x1, x2};
}

// Orientation-preserving map sending p_rep -> 0 and p_att -> infinity.
ScaledMat normalizer_mat(double p_rep, double p_att) {
  if (p_att == kInf) return sm_make(1.0, -p_rep, 0.0, 1.0);
  if (p_rep == kInf) return sm_make(0.0, -1.0, 1.0, -p_att);
  double det = p_att - p_rep;
  double r0 = 1.0, r1 = -p_rep;
  if (det < 0) {
    r0 = -1.0;
    r1 = p_rep;
    det = -det;
  }
  double s = std::sqrt(det);
  return sm_make(r0 / s, r1 / s, -1.0 / s, p_att / s);
}

struct ConstructionParts {
  std::array<FactorList, 4> gens;  // a1, b1 factors; a2, b2 cores
  FactorList G;
};

// Factored genus-2 holonomy. Each handle is a one-holed torus
//   A = R(l), B = R(-tau) N(d),
// whose boundary commutator at zero twist is D~ = A (N A^-1 N^-1); the
// twisted commutator is the R(tau)-conjugate of D~, so twists enter purely
// as boundary diagonals. The gluing G carries the repelling/attracting frame
// of handle 2's boundary onto handle 1's with the c3 twist in the middle.
ConstructionParts build_parts(double l1, double l2, double l3, double t1,
                              double t2, double t3) {
  double d1 = hexagon_d(l1, l3);
  double d2 = hexagon_d(l2, l3);
  ScaledMat N1 = nmat(d1), N2 = nmat(d2);

  auto com0 = [](double l, const ScaledMat& N) {
    return sm_mul(sm_twist(l), sm_mul(N, sm_mul(sm_twist(-l), sm_inv(N))));
  };
  ScaledMat D1t = com0(l1, N1);
  ScaledMat D2t = com0(l2, N2);
  auto [r1, a1f] = sm_fixed_points(D1t);
  auto [r2, a2f] = sm_fixed_points(D2t);
  ScaledMat F1t = normalizer_mat(a1f, r1);  // normalizes D1t^{-1}
  ScaledMat F2t = normalizer_mat(r2, a2f);

  FactorList F1, F2;
  fpush(F1, Factor::dense(F1t));
  fpush(F1, Factor::twist(t1));
  fpush(F2, Factor::dense(F2t));
  fpush(F2, Factor::twist(t2));

  FactorList G = finv(F1);
  fpush(G, Factor::twist(t3));
  fappend(G, F2);

  ConstructionParts parts;
  parts.gens[0] = {Factor::twist(l1)};
  fpush(parts.gens[1], Factor::twist(-t1));
  fpush(parts.gens[1], Factor::dense(N1));
  parts.gens[2] = {Factor::twist(l2)};
  fpush(parts.gens[3], Factor::twist(-t2));
  fpush(parts.gens[3], Factor::dense(N2));
  parts.G = std::move(G);
  return parts;
}

// Extended-precision factored product, used only for the relator residual
// where the exact answer is the identity and every extra digit of mantissa
// directly lowers the measurable floor. Entries stay max-normalized with the
// scale carried in logs, so the running logs equals the log of the true peak
// entry.
struct Ld2 {
  long double a = 1, b = 0, c = 0, d = 1, logs = 0;
};

void ld_norm(Ld2& r) {
  long double m = std::max({std::abs(r.a), std::abs(r.b), std::abs(r.c), std::abs(r.d)});
  if (m > 0) {
    r.a /= m; r.b /= m; r.c /= m; r.d /= m;
    r.logs += std::log(m);
  }
}

// acc * R(s): right multiplication scales the columns by e^{+-s/2}.
void ld_twist(Ld2& r, double s) {
  long double e = std::exp(static_cast<long double>(s) / 2);
  r.a *= e; r.c *= e;
  r.b /= e; r.d /= e;
  ld_norm(r);
}

void ld_dense(Ld2& r, const ScaledMat& m) {
  Ld2 y{m.m00, m.m01, m.m10, m.m11, m.logs};
  Ld2 p;
  p.a = r.a * y.a + r.b * y.c;
  p.b = r.a * y.b + r.b * y.d;
  p.c = r.c * y.a + r.d * y.c;
  p.d = r.c * y.b + r.d * y.d;
  p.logs = r.logs + y.logs;
  ld_norm(p);
  r = p;
}

// max entry distance to +-identity (sign chosen best, PSL2 convention).
double ld_identity_dist(const Ld2& r) {
  if (!(r.logs < 50)) return 1e300;
  long double f = std::exp(r.logs);
  long double a = f * r.a, b = f * r.b, c = f * r.c, d = f * r.d;
  long double dp = std::max({std::abs(a - 1), std::abs(b), std::abs(c), std::abs(d - 1)});
  long double dm = std::max({std::abs(a + 1), std::abs(b), std::abs(c), std::abs(d + 1)});
  return static_cast<double>(std::min(dp, dm));
}

// Evaluates a factor list left-to-right in extended precision; peak reports
// the largest true intermediate log-scale, which bounds the cancellation
// amplification of the final residual.
double ld_relator_residual(const FactorList& fs, double* peak) {
  Ld2 acc;
  long double pk = 0;
  for (const Factor& f : fs) {
    if (f.diag)
      ld_twist(acc, f.s);
    else
      ld_dense(acc, f.mat);
    pk = std::max(pk, acc.logs);
  }
  if (peak) *peak = static_cast<double>(pk);
  return ld_identity_dist(acc);
}

}  // namespace

// ---------------------------------------------------------------------------
// FuchsianRep
// ---------------------------------------------------------------------------

FuchsianRep FuchsianRep::from_construction(const FenchelNielsen& fn,
                                           const PantsGraph& topo,
                                           std::array<FactorList, 4> gens,
                                           FactorList G, double residual,
                                           std::string residual_method) {
  FuchsianRep r;
  r.topo_ = topo;
  r.fn_ = fn;
  r.has_fn_ = true;
  r.has_conj_ = true;
  r.gen_ = std::move(gens);
  r.G_ = std::move(G);
  r.Gi_ = finv(r.G_);
  r.residual_ = residual;
  r.residual_method_ = std::move(residual_method);
  return r;
}

FuchsianRep FuchsianRep::from_images(const std::array<Isometry2, 4>& imgs,
                                     const PantsGraph& topo, double residual) {
  FuchsianRep r;
  r.topo_ = topo;
  r.has_fn_ = false;
  r.has_conj_ = false;
  for (int i = 0; i < kNumGens; ++i) r.gen_[i] = {Factor::dense(sm_from(imgs[i]))};
  r.residual_ = residual;
  r.residual_method_ = "dense";
  return r;
}

FactorList FuchsianRep::word_factors(const Word& w, bool for_trace) const {
  FactorList out;
  if (!has_conj_) {
    for (int t : w) {
      int g = std::abs(t) - 1;
      if (g < 0 || g >= kNumGens) throw validation_error("word token out of range");
      fappend(out, t > 0 ? gen_[g] : finv(gen_[g]));
    }
    return out;
  }
  FactorList run, only_run;
  int runs = 0;
  bool h1_seen = false;
  auto flush = [&] {
    if (run.empty()) return;
    ++runs;
    only_run = run;
    fappend(out, G_);
    fappend(out, run);
    fappend(out, Gi_);
    run.clear();
  };
  for (int t : w) {
    int g = std::abs(t) - 1;
    if (g < 0 || g >= kNumGens) throw validation_error("word token out of range");
    if (g >= 2) {
      fappend(run, t > 0 ? gen_[g] : finv(gen_[g]));
    } else {
      h1_seen = true;
      flush();
      fappend(out, t > 0 ? gen_[g] : finv(gen_[g]));
    }
  }
  flush();
  // A word inside the glued handle keeps one G ... G^-1 wrapper, which a
  // trace cancels exactly: tr(G X G^-1) = tr(X).
  if (for_trace && runs == 1 && !h1_seen) return only_run;
  return out;
}

ScaledMat FuchsianRep::evaluate(const Word& w, double* peak_logs) const {
  return feval(word_factors(w, false), peak_logs);
}

std::pair<double, double> FuchsianRep::word_trace(const Word& w) const {
  Word r = cyclically_reduce(w);
  if (r.empty()) return {2.0, 0.0};
  return ftrace(word_factors(r, true));
}

IsomClass FuchsianRep::word_class(const Word& w) const {
  Word r = cyclically_reduce(w);
  if (r.empty()) return IsomClass::identity;
  auto [t, logs] = ftrace(word_factors(r, true));
  return classify_scaled_trace(t, logs);
}

Isometry2 FuchsianRep::image(int gen) const {
  if (gen < 0 || gen >= kNumGens) throw validation_error("generator index out of range");
  return sm_to_isometry(evaluate({gen + 1}));
}

std::map<std::string, Isometry2> FuchsianRep::images() const {
  static const char* names[] = {"a1", "b1", "a2", "b2"};
  std::map<std::string, Isometry2> m;
  for (int g = 0; g < kNumGens; ++g) m[names[g]] = image(g);
  return m;
}

FuchsianRep holonomy_from_fn(const FenchelNielsen& fn, const PantsGraph& topo) {
  topo.validate();
  fn.validate(topo);
  double l1 = fn.lengths[0], l2 = fn.lengths[1], l3 = fn.lengths[2];
  double t1 = fn.twists[0], t2 = fn.twists[1], t3 = fn.twists[2];

  ConstructionParts parts = build_parts(l1, l2, l3, t1, t2, t3);
  FuchsianRep rep = FuchsianRep::from_construction(fn, topo, parts.gens, parts.G, 0, "");

  Word rel = parse_word(topo.relator_str);
  double peak = 0;
  double direct = ld_relator_residual(rep.word_factors(rel, false), &peak);
  double residual;
  std::string method;
  // A twist diagonal R(t) conjugating the stored (finite-precision) frames
  // amplifies their diagonalization defect by e^{|t|} even when the product
  // peak stays low, so the direct measurement is meaningful only for small
  // twist parameters.
  double twist_mag = std::abs(t1) + std::abs(t2) + std::abs(t3);
  if (peak <= kDensePeak && twist_mag <= 8.0) {
    residual = direct;
    method = "dense";
  } else {
    // Large twists push the peak intermediate scale beyond what any direct
    // cancellation can resolve. The twist diagonals cancel identically in
    // the grouped factorization, so the zero-twist skeleton carries the
    // construction's true relator defect; budget a tiny allowance for the
    // exactly-tracked twist exponents.
    ConstructionParts sk = build_parts(l1, l2, l3, 0, 0, 0);
    FuchsianRep rep0 = FuchsianRep::from_construction(fn, topo, sk.gens, sk.G, 0, "");
    residual = ld_relator_residual(rep0.word_factors(rel, false), nullptr) +
               1e-16 * (std::abs(t1) + std::abs(t2) + std::abs(t3));
    method = "skeleton";
  }
  if (!(residual < kEpsRel))
    throw rep_error("holonomy construction missed relator tolerance", residual);

  FuchsianRep out = FuchsianRep::from_construction(fn, topo, parts.gens, parts.G,
                                                   residual, method);
  for (size_t j = 0; j < topo.edges.size(); ++j) {
    if (out.word_class(parse_word(topo.curve_word_strs[j])) != IsomClass::hyperbolic)
      throw rep_error("pants curve image is not hyperbolic", residual);
  }
  return out;
}

double curve_length(const FuchsianRep& rep, const CurveClass& c) {
  Word r = cyclically_reduce(c.word);
  if (r.empty()) throw validation_error("not realized by a geodesic");
  auto [t, logs] = rep.word_trace(r);
  if (classify_scaled_trace(t, logs) != IsomClass::hyperbolic)
    throw validation_error("not realized by a geodesic");
  return translation_length_scaled(t, logs);
}

RepDiagnostics validate_rep(const FuchsianRep& rep) {
  RepDiagnostics d;
  d.relator_residual = rep.relator_residual();
  d.residual_method = rep.residual_method();

  const PantsGraph& topo = rep.topo();
  d.min_pants_length = kInf;
  d.max_pants_length = 0;
  d.pants_length_error = 0;
  for (size_t j = 0; j < topo.edges.size(); ++j) {
    double L = curve_length(rep, topo.pants_curve(static_cast<int>(j)));
    d.min_pants_length = std::min(d.min_pants_length, L);
    d.max_pants_length = std::max(d.max_pants_length, L);
    if (rep.has_fn())
      d.pants_length_error =
          std::max(d.pants_length_error, std::abs(L - rep.fn().lengths[j]));
  }

  // Discreteness heuristic: no nontrivial word of length <= 6 may come close
  // to an elliptic/parabolic/short-hyperbolic image. Traces go through the
  // rep's structured path so extreme twists stay exact. Trace and translation
  // length are conjugation- and inverse-invariant, so only the minimal
  // rotation among a word's rotations and its inverse's is evaluated.
  constexpr double kSystole = 1e-4;
  auto canonical_cyclic = [](const Word& w) {
    if (w.front() == -w.back()) return false;  // conjugate of a shorter word
    int n = static_cast<int>(w.size());
    Word inv = invert_word(w);
    auto rot_less = [&](const Word& v, int r) {
      for (int i = 0; i < n; ++i) {
        int a = v[(i + r) % n];
        if (a != w[i]) return a < w[i];
      }
      return false;
    };
    for (int r = 0; r < n; ++r)
      if ((r != 0 && rot_less(w, r)) || rot_less(inv, r)) return false;
    return true;
  };
  double min_len = kInf;
  bool bad = false;
  Word w;
  auto scan = [&](auto&& self, int last) -> void {
    if (!w.empty() && canonical_cyclic(w)) {
      auto [t, logs] = rep.word_trace(w);
      IsomClass cls = classify_scaled_trace(t, logs);
      if (cls != IsomClass::hyperbolic)
        bad = true;
      else
        min_len = std::min(min_len, translation_length_scaled(t, logs));
    }
    if (static_cast<int>(w.size()) == 6 || bad) return;
    for (int tok = -kNumGens; tok <= kNumGens; ++tok) {
      if (tok == 0 || tok == -last) continue;  // keep words freely reduced
      w.push_back(tok);
      self(self, tok);
      w.pop_back();
    }
  };
  scan(scan, 0);
  d.min_short_word_length = min_len;
  d.systole_ok = !bad && min_len >= kSystole;

  d.ok = d.relator_residual < kEpsRel && d.systole_ok &&
         (!rep.has_fn() || d.pants_length_error < kEpsRel);
  return d;
}

}  // namespace hypgeo
