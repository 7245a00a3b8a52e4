#pragma once

// Virasoro, N=1 and N=2 Neveu-Schwarz algebras: structure constants, PBW
// normal ordering, Verma modules over exact rationals and singular vectors.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssle/grassmann.hpp"
#include "ssle/rational_linalg.hpp"
#include "ssle/scalar.hpp"

namespace ssle {

enum class Family { C, L, J, Gp, Gm, G };

/// A generator with its mode stored doubled so half-integer modes stay integral.
struct Gen {
  Family family = Family::L;
  int twice_mode = 0;

  bool odd() const { return family == Family::G || family == Family::Gp || family == Family::Gm; }
  Rational mode() const { return make_rational(twice_mode, 2); }
  friend auto operator<=>(const Gen&, const Gen&) = default;
};

inline Gen L(int m) { return {Family::L, 2 * m}; }
inline Gen J(int m) { return {Family::J, 2 * m}; }
inline Gen Cgen() { return {Family::C, 0}; }
/// Odd generators take the doubled mode, e.g. G(-1) is G_{-1/2}.
inline Gen G(int twice) { return {Family::G, twice}; }
inline Gen Gp(int twice) { return {Family::Gp, twice}; }
inline Gen Gm(int twice) { return {Family::Gm, twice}; }

using Monomial = std::vector<Gen>;

std::string gen_string(const Gen& g);
std::string monomial_string(const Monomial& m);
Gen parse_gen(const std::string& s);
Monomial parse_monomial(const std::string& s);
int monomial_parity(const Monomial& m);
/// Sum of -2*mode over the monomial.
int twice_level(const Monomial& m);

enum class AlgebraKind { Virasoro, NS1, NS2 };
enum class NS2Table { Standard, Printed };

struct Algebra {
  AlgebraKind kind = AlgebraKind::Virasoro;
  NS2Table table = NS2Table::Standard;

  bool contains(const Gen& g) const;
  std::string name() const;
};

Algebra virasoro();
Algebra ns1();
Algebra ns2(NS2Table table = NS2Table::Standard);

/// Linear combination of generators (C included).
using GenCombination = std::map<Gen, Rational>;

/// Super-bracket [x, y}: anticommutator when both are odd.
GenCombination bracket(const Gen& x, const Gen& y, const Algebra& alg);

/// Element of the universal enveloping algebra with rational coefficients.
struct UEAElement {
  std::map<Monomial, Rational> terms;

  void add(const Monomial& m, const Rational& c);
  bool is_zero() const { return terms.empty(); }
  std::string to_string() const;
  friend bool operator==(const UEAElement& a, const UEAElement& b) { return a.terms == b.terms; }
};

UEAElement uea_monomial(const Monomial& m, const Rational& c = 1);
UEAElement operator+(const UEAElement& a, const UEAElement& b);
UEAElement operator*(const UEAElement& a, const UEAElement& b);
UEAElement operator*(const Rational& s, const UEAElement& a);

/// PBW sort key: modes ascending (most negative leftmost), then L < J < G+ < G- < G; C leftmost.
bool pbw_less(const Gen& a, const Gen& b);
bool is_normal_ordered(const Monomial& m);
UEAElement normal_order(const UEAElement& x, const Algebra& alg);

/// Graded Jacobi identity on one triple; returns the (normal-ordered) violation.
GenCombination jacobi_violation(const Gen& x, const Gen& y, const Gen& z, const Algebra& alg);

/// Positive and zero-mode generators with |mode| <= max_twice/2, plus the
/// negative ones; used for randomized structure-constant checks.
std::vector<Gen> generators_up_to(const Algebra& alg, int max_twice);

// ----------------------------------------------------------------------------
// Verma modules.

struct Weights {
  Rational c = 0;
  Rational h = 0;
  Rational alpha = 0;  // U(1) charge, N=2 only
};

/// Vector in a Verma module: PBW monomials of negative modes applied to |hw>.
using VermaVector = std::map<Monomial, Rational>;

std::string verma_string(const VermaVector& v);
void verma_add(VermaVector& v, const Monomial& m, const Rational& c);

class VermaModule {
 public:
  VermaModule(Algebra alg, Weights w) : alg_(alg), w_(std::move(w)) {}

  const Algebra& algebra() const { return alg_; }
  const Weights& weights() const { return w_; }

  /// x . (monomial |hw>).
  VermaVector apply(const Gen& x, const Monomial& m) const;
  VermaVector apply(const Gen& x, const VermaVector& v) const;
  /// u . v, applying the generators of each monomial right to left.
  VermaVector act(const UEAElement& u, const VermaVector& v) const;

  /// Generating set of the positive part used for singular-vector checks.
  std::vector<Gen> positive_generators() const;

  /// PBW basis of levels <= twice_max/2, sorted by level then monomial.
  std::vector<Monomial> basis(int twice_max) const;

  /// Shapovalov form <b|v>: coefficient of |hw> in b^dagger v.
  Rational shapovalov(const Monomial& b, const VermaVector& v) const;

 private:
  Algebra alg_;
  Weights w_;
  mutable std::map<std::pair<Gen, Monomial>, VermaVector> cache_;
};

Gen dagger(const Gen& g);

struct SingularReport {
  bool pass = false;
  std::optional<Gen> witness;
  VermaVector witness_image;
  std::vector<std::string> transcript;
};

/// Annihilation by the positive generating set. Throws UsageError on inhomogeneous input.
SingularReport is_singular(const VermaModule& mod, const VermaVector& v);

/// Template sum_i y_i m_i |hw> with y_0 = 1; the remaining y_i and the central
/// charge are unknowns, h (and alpha) are fixed.
struct SingularSolution {
  bool found = false;
  std::string status;
  Rational c;
  RVector coefficients;  // including the leading 1
};

SingularSolution solve_singular_params(const Algebra& alg, const std::vector<Monomial>& templ, const Rational& h,
                                       const Rational& alpha = 0);

// ----------------------------------------------------------------------------
// Matrices on the level-truncated PBW basis.

struct GeneratorMatrix {
  // column j: list of (row, value)
  std::vector<std::vector<std::pair<int, Rational>>> columns;
};

class TruncatedModule {
 public:
  TruncatedModule(const VermaModule& mod, int twice_max);

  const std::vector<Monomial>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int index_of(const Monomial& m) const;
  int parity(int i) const { return parity_[i]; }
  int twice_level(int i) const { return level_[i]; }
  const VermaModule& module() const { return mod_; }
  int twice_max() const { return twice_max_; }

  /// Matrix of a UEA element (normal-ordered on the fly), dropping levels above the cut.
  GeneratorMatrix matrix(const UEAElement& u) const;
  /// Coordinates of a Verma vector (levels above the cut dropped).
  RVector coordinates(const VermaVector& v) const;
  /// Shapovalov Gram matrix on the basis.
  RMatrix gram() const;

 private:
  VermaModule mod_;
  int twice_max_;
  std::vector<Monomial> basis_;
  std::map<Monomial, int> index_;
  std::vector<int> parity_;
  std::vector<int> level_;
};

/// Grassmann-valued linear combination of UEA monomials, coefficients on the left.
struct SuperTerm {
  Grassmann<Rational> coef;
  Monomial mono;
};
using SuperUEA = std::vector<SuperTerm>;

/// Product with the Koszul sign from moving the right coefficient past the left monomial.
SuperUEA super_product(const SuperUEA& a, const SuperUEA& b);
/// Normal-ordered canonical form keyed by monomial.
std::map<Monomial, Grassmann<Rational>> super_normal_form(const SuperUEA& x, const Algebra& alg, int n_gens);

/// Dense Grassmann-valued matrix (row-major) of exp(-sum(...)) on the truncated module.
struct GrassmannMatrix {
  int dim = 0;
  int n_gens = 0;
  std::vector<Grassmann<Rational>> entries;
  const Grassmann<Rational>& at(int r, int c) const { return entries[r * dim + c]; }
  Grassmann<Rational>& at(int r, int c) { return entries[r * dim + c]; }
};

/// Matrix of a super element: entry (b', b) = sum (-1)^{|mu| p(b')} mu O_{b'b}.
GrassmannMatrix super_matrix(const TruncatedModule& tm, const SuperUEA& x, int n_gens);
GrassmannMatrix matrix_product(const GrassmannMatrix& a, const GrassmannMatrix& b);
/// exp of a strictly level-raising matrix (terminating series).
GrassmannMatrix nilpotent_exp(const GrassmannMatrix& m);
GrassmannMatrix identity_matrix(int dim, int n_gens);

/// Q(E_V) = exp(-sum_j (A_j L_j + B_j J_j + M G + M+ G+ + M- G-)) on levels <= twice_max/2.
/// A, B keyed by j; odd coefficients keyed by j for mode j + 1/2.
GrassmannMatrix q_matrix(const TruncatedModule& tm, int n_gens, const std::map<int, Grassmann<Rational>>& A,
                         const std::map<int, Grassmann<Rational>>& B, const std::map<int, Grassmann<Rational>>& M,
                         const std::map<int, Grassmann<Rational>>& Mp, const std::map<int, Grassmann<Rational>>& Mm);

}  // namespace ssle
