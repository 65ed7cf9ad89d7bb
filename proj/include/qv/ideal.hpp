// Ideals of Q[t]: the universe is the polynomial ring, points are ideals.
//
// Universe codec. The height of a rational r = p/q in lowest terms is
// H(r) = max(|p|, q), with H(0) = 0. The height of a nonzero polynomial is
// deg + max H(c_i); the zero polynomial has height 0 and rank 0. Polynomials
// are ranked by height, then degree, then lexicographically on the
// coefficients from the leading one down, where rationals are ordered by
// height and then by value (0, -1, 1, -2, -1/2, 1/2, 2, ...).

#ifndef QV_IDEAL_HPP_
#define QV_IDEAL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qv/engine.hpp"
#include "qv/operators.hpp"
#include "qv/types.hpp"

namespace qv::ideal {

using Rational = boost::multiprecision::cpp_rational;

Natural rational_height(const Rational& r);

/// Dense coefficients, lowest degree first, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs);
  static Poly constant(const Rational& c);
  static Poly monomial(const Rational& c, std::size_t k);

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const Rational& lead() const;  // Error on zero

  friend bool operator==(const Poly&, const Poly&) = default;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a);
  friend Poly operator*(const Poly& a, const Poly& b);

 private:
  void trim();
  std::vector<Rational> c_;
};

struct DivMod {
  Poly quotient;
  Poly remainder;
};

/// Error when the divisor is zero.
DivMod divmod(const Poly& a, const Poly& b);

/// u a + v b = g with g monic (g = 0 when a = b = 0).
struct Bezout {
  Poly g;
  Poly u;
  Poly v;
};
Bezout extended_gcd(const Poly& a, const Poly& b);

Natural height(const Poly& p);

/// Grammar (no spaces): poly := "0" | ["-"] term (("+" | "-") term)*,
/// term := coef | [coef] "t" ["^" digits], coef := digits ["/" digits].
/// Terms may repeat degrees; they are summed. ParseError otherwise.
Poly parse_poly(const std::string& text);
/// Descending degree, coefficient 1 omitted before t: "3/2t^2-t+4".
std::string format_poly(const Poly& p);

Natural count_upto(std::uint64_t height);  // polynomials of height <= height
Natural rank(const Poly& p);
Poly unrank(const Natural& i);
AtomId atom_of(const Poly& p);
Poly poly_of(const AtomId& a);

/// All polynomials of height <= h in codec order.
std::vector<Poly> polys_upto(std::uint64_t h);

/// Stream layout: index 0 is (empty => 0). For i >= 1 let j = (i - 1) / 3:
///   (i - 1) mod 3 = 0   {a_j} => -a_j
///   (i - 1) mod 3 = 1   {a, b} => a + b     with (a, b) = unpair(j)
///   (i - 1) mod 3 = 2   {a} => f a          with (a, f) = unpair(j)
RuleStreamPtr ideal_rules();

RuleIndex negation_rule_index(const Poly& a);
RuleIndex sum_rule_index(const Poly& a, const Poly& b);
RuleIndex multiple_rule_index(const Poly& a, const Poly& f);

/// Rule budget that fires {p} => f p for every f of height <= h.
std::uint64_t ideal_closure_budget(const Poly& p, std::uint64_t h);

/// p | q. Error when p = 0.
bool principal_membership(const Poly& p, const Poly& q);

/// A rational root, if any.
std::optional<Rational> rational_root(const Poly& p);

/// Error "reducible" when deg p <= 3 and p has a rational root (or deg p < 1).
/// Degrees >= 4 are accepted unchecked.
void check_irreducible(const Poly& p);

/// The presentation operator of ideal_rules. Witnesses are Bezout
/// derivations: goal = (goal / g)(u x + v b) for available x, b with
/// gcd g dividing the goal; `effort` caps the pairs tried.
OperatorPtr ideal_operator();

struct DemoReport {
  Poly p;
  std::uint64_t budget = 0;
  std::uint64_t max_height = 0;
  std::size_t enumerated = 0;  // atoms in the engine enumeration of (p)
  std::size_t checked = 0;
  std::size_t members = 0;
  std::vector<Poly> certified;  // certified non-members, codec order
  std::vector<Poly> unsound;    // certified although p divides them
  std::vector<Poly> missed;     // non-members left uncertified
  std::size_t emitted_nonmembers = 0;  // engine atoms that p does not divide
  bool ok() const { return unsound.empty() && missed.empty() && emitted_nonmembers == 0; }
};

/// Runs complement_op_maximal(ideal_operator(), 1) against closure({p}) with
/// the given budget over every polynomial of height <= max_height and checks
/// both directions against principal_membership. check_irreducible first.
DemoReport maximal_ideal_demo(const Poly& p, std::uint64_t budget, std::uint64_t max_height = 4);

}  // namespace qv::ideal

#endif  // QV_IDEAL_HPP_
