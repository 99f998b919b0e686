#pragma once
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypgeo/moebius.hpp"

namespace hypgeo {

// Words in the surface-group generators a1, b1, a2, b2. Token k > 0 is
// generator k-1, token -k its inverse ("A1" style capitals in text form).
using Word = std::vector<int>;

Word parse_word(const std::string& s);
std::string word_to_string(const Word& w);
Word freely_reduce(Word w);
Word cyclically_reduce(Word w);
Word invert_word(const Word& w);
Word conjugate_word(const Word& h, const Word& w);  // h w h^-1, reduced

struct CurveClass {
  std::string name;
  Word word;  // nonempty, cyclically reduced

  static CurveClass from_word(const std::string& name, const std::string& word_str);
};

// Combinatorial backbone: pants decomposition of the closed genus-2 surface.
// Two pairs of pants; c1 and c2 are self-gluings (the two handles), c3 joins
// the pants. Generators a1,b1,a2,b2 with relator [a1,b1][a2,b2].
struct PantsGraph {
  struct End {
    int node = 0;
    int slot = 0;
  };
  int genus = 2;
  std::vector<std::array<End, 2>> edges;         // 3g-3 gluing curves
  std::vector<std::string> curve_names;          // "c1","c2","c3"
  std::vector<std::string> curve_word_strs;      // words of the pants curves
  std::string relator_str = "a1 b1 A1 B1 a2 b2 A2 B2";

  static PantsGraph genus2_default();
  void validate() const;
  CurveClass pants_curve(int j) const;
  // Index of the pants curve whose class equals the given word (up to cyclic
  // reduction, rotation and inversion), or nullopt.
  std::optional<int> match_pants_curve(const CurveClass& c) const;
};

struct FenchelNielsen {
  std::vector<double> lengths;  // 3g-3 positive reals
  std::vector<double> twists;   // 3g-3 signed reals

  void validate(const PantsGraph& topo) const;
};

// The standard 9-curve marking set used throughout: the four generators, the
// separating commutator curve, and four two-letter companions. Includes all
// three pants curves of the default decomposition.
const std::vector<CurveClass>& marking_set();

// Discrete faithful representation built from FN coordinates. Generator
// images are kept in factored form (twist diagonals stay symbolic) so that
// word traces remain accurate at arbitrarily large twist parameters; dense
// matrices are materialized only when they fit comfortably in double range.
class FuchsianRep {
 public:
  // Construction result plumbing (used by holonomy_from_fn / earthquake).
  static FuchsianRep from_construction(const FenchelNielsen& fn,
                                       const PantsGraph& topo,
                                       std::array<FactorList, 4> h1_or_core,
                                       FactorList G, double residual,
                                       std::string residual_method);
  static FuchsianRep from_images(const std::array<Isometry2, 4>& imgs,
                                 const PantsGraph& topo, double residual);

  // Factor list of a word; when for_trace, a word lying entirely in the
  // second handle drops its conjugator pair (tr(G X G^-1) = tr(X)).
  FactorList word_factors(const Word& w, bool for_trace) const;
  ScaledMat evaluate(const Word& w, double* peak_logs = nullptr) const;
  std::pair<double, double> word_trace(const Word& w) const;  // cyclically reduces
  IsomClass word_class(const Word& w) const;

  // Dense generator image; throws rep_error when entries exceed double range.
  Isometry2 image(int gen) const;
  std::map<std::string, Isometry2> images() const;

  double relator_residual() const { return residual_; }
  const std::string& residual_method() const { return residual_method_; }
  const PantsGraph& topo() const { return topo_; }
  const FenchelNielsen& fn() const { return fn_; }
  bool has_fn() const { return has_fn_; }

 private:
  FuchsianRep() = default;
  PantsGraph topo_;
  FenchelNielsen fn_;
  bool has_fn_ = false;
  bool has_conj_ = false;           // generators 2,3 stored as G core G^-1
  std::array<FactorList, 4> gen_;   // h1 factors / h2 cores (or plain images)
  FactorList G_, Gi_;
  double residual_ = 0;
  std::string residual_method_ = "dense";
};

// Right-angled-hexagon construction of the genus-2 holonomy. Throws
// validation_error on bad inputs and rep_error (carrying the residual) if the
// construction misses its relator tolerance.
FuchsianRep holonomy_from_fn(const FenchelNielsen& fn, const PantsGraph& topo);

// Length of the geodesic representative: translation length of rho(word).
// Throws validation_error("not realized by a geodesic") when the image is
// not hyperbolic.
double curve_length(const FuchsianRep& rep, const CurveClass& c);

struct RepDiagnostics {
  double relator_residual = 0;
  std::string residual_method;
  double min_pants_length = 0, max_pants_length = 0;
  double pants_length_error = 0;  // max |L(c_j) - l_j|
  double min_short_word_length = 0;  // over nontrivial words of length <= 6
  bool systole_ok = false;
  bool ok = false;
};

RepDiagnostics validate_rep(const FuchsianRep& rep);

}  // namespace hypgeo
