// Marked groups on k generators: the universe is the free group F_k, points
// are normal subgroups (word problems).
//
// Letters are coded 2i (generator i) and 2i + 1 (its inverse), so the order
// is a1 < a1^-1 < a2 < ... . Universe codec: length-lex rank of reduced
// words; there are 2k (2k - 1)^(L - 1) reduced words of length L >= 1.

#ifndef QV_GROUP_HPP_
#define QV_GROUP_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qv/engine.hpp"
#include "qv/operators.hpp"
#include "qv/types.hpp"

namespace qv::group {

using Letter = std::uint8_t;

/// A freely reduced word. Construction from raw letters reduces.
class ReducedWord {
 public:
  ReducedWord() = default;
  static ReducedWord reduce(const std::vector<Letter>& letters);
  static ReducedWord generator(std::size_t i, bool inverse = false);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend auto operator<=>(const ReducedWord&, const ReducedWord&) = default;

 private:
  std::vector<Letter> letters_;
};

inline Letter inverse_letter(Letter c) { return c ^ 1; }

ReducedWord product(const ReducedWord& u, const ReducedWord& v);
ReducedWord inverse(const ReducedWord& w);
/// h w h^-1
ReducedWord conjugate(const ReducedWord& w, const ReducedWord& h);

/// Letters a..z are generators, uppercase their inverses; "1" or "-" is the
/// identity. The result is freely reduced. ParseError on letters >= k.
ReducedWord parse_word(const std::string& text, std::size_t k);
std::string format_word(const ReducedWord& w);  // identity prints as "1"

std::uint64_t count_of_length(std::size_t k, std::size_t len);
std::uint64_t count_upto(std::size_t k, std::size_t len);
std::optional<std::uint64_t> rank(const ReducedWord& w, std::size_t k);
ReducedWord unrank(std::uint64_t i, std::size_t k);
AtomId atom_of(const ReducedWord& w, std::size_t k);  // RangeError on overflow
ReducedWord word_of(AtomId a, std::size_t k);

/// Reduced words of length <= len in codec order.
std::vector<ReducedWord> ball(std::size_t k, std::size_t len);

/// Stream layout: index 0 is (empty => 1). For i >= 1 let j = (i - 1) / 3:
///   (i - 1) mod 3 = 0   {w_j} => w_j^-1
///   (i - 1) mod 3 = 1   {g, h} => gh        with (g, h) = unpair(j)
///   (i - 1) mod 3 = 2   {g} => h g h^-1     with (g, h) = unpair(j)
/// Local witness searches at radius r use inverses, conjugation by single
/// letters, products with known atoms of length <= r / 3, and products
/// whose conclusion has length <= r / 3; all atoms stay within length r.
RuleStreamPtr group_rules(std::size_t k);

RuleIndex inverse_rule_index(std::uint64_t w);
RuleIndex product_rule_index(std::uint64_t g, std::uint64_t h);
RuleIndex conjugation_rule_index(std::uint64_t g, std::uint64_t h);

struct GroupPresentation {
  std::size_t k = 0;
  std::vector<ReducedWord> relators;
};

/// <a, b | a^2, b^3, (ab)^5>, the icosahedral group of order 60.
GroupPresentation icosahedral_presentation();

using Perm = std::vector<std::uint8_t>;

/// The finite permutation group generated by the images of the generators.
class PermOracle {
 public:
  /// Error naming the first relator that does not evaluate to the identity.
  PermOracle(const GroupPresentation& p, std::vector<Perm> images);

  std::size_t degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Perm>& elements() const { return elements_; }
  const std::vector<Perm>& images() const { return images_; }

  Perm evaluate(const ReducedWord& w) const;
  bool word_is_identity(const ReducedWord& w) const;

  /// Position of a permutation in elements().
  std::size_t index_of(const Perm& p) const { return index_.at(p); }
  Perm compose(const Perm& x, const Perm& y) const;  // x then y
  Perm invert(const Perm& x) const;
  Perm identity() const;

 private:
  std::size_t degree_;
  std::vector<Perm> images_;
  std::vector<Perm> elements_;
  std::map<Perm, std::size_t> index_;
};

/// Searches degree-5 pairs (a, b) with a^2 = b^3 = (ab)^5 = 1 generating a
/// group of order 60, and returns the oracle for the first pair found.
PermOracle icosahedral_oracle();

/// g1 values for the nonidentity elements of the ball of radius n_max.
struct SimplicityProfile {
  std::vector<std::pair<ReducedWord, std::uint64_t>> g1;  // one word per element
  std::vector<std::uint64_t> g1_prime;                    // index n = 0..n_max
};

/// Least p <= p_max such that every generator is a product of fewer than p
/// elements h w^(+-1) h^-1, each h a product of fewer than p generators or
/// their inverses. nullopt for the identity; Error when p_max is exhausted.
std::optional<std::uint64_t> g1_value(const PermOracle& o, const ReducedWord& w,
                                      std::uint64_t p_max);

/// True iff every generator is a product of fewer than t conjugates of w
/// (conjugators of fewer than t letters).
bool generators_reached(const PermOracle& o, const ReducedWord& w, std::uint64_t t);

SimplicityProfile simplicity_profile(const PermOracle& o, std::size_t n_max, std::uint64_t p_max);

/// k = 1: S_p = {a^(p+1)}, h(p) = 1.
FiniteFamily z_family();

/// Witness-search radius and family probe under which complement_op_below_family
/// over z_family certifies every a^m with 1 <= |m| <= 10 against X = {1}.
inline constexpr std::uint64_t kZFamilyEffort = 24;
inline constexpr std::uint64_t kZFamilyProbe = 16;

enum class Verdict { kEqual, kNotEqual, kUndecided };
std::string to_string(Verdict v);

struct Decision {
  Verdict verdict = Verdict::kUndecided;
  std::uint64_t ticks = 0;  // ticks run, including the deciding one
};

/// Word problem of a simple group. Tick t (t < cap) works at radius
/// start_radius + t: the Equal side is the local closure of the relators at
/// that radius. The NotEqual side looks for a certificate of
/// complement_op_uniform over the generators against it, checked with eval.
/// The search runs over words kept irreducible by the length-reducing rules
/// l -> r with l r^-1 on the Equal side; every rewrite is an inverse, a
/// conjugation and a product from the group stream.
class GroupWordDecider {
 public:
  GroupWordDecider(GroupPresentation p, std::uint64_t cap, std::uint64_t start_radius = 4);
  ~GroupWordDecider();

  Decision decide(const ReducedWord& w);
  const AtomSet& equal_side(std::uint64_t tick);
  /// Certificate n with eval(w, n) inside equal_side(tick), if found.
  std::optional<Natural> certify(AtomId w, std::uint64_t tick);
  std::uint64_t radius(std::uint64_t tick) const { return start_radius_ + tick; }
  std::uint64_t cap() const { return cap_; }

  struct RewriteSystem;

 private:
  const RewriteSystem& rewrite_system(std::uint64_t tick);

  GroupPresentation p_;
  std::uint64_t cap_;
  std::uint64_t start_radius_;
  RuleStreamPtr stream_;
  OperatorPtr complement_;
  std::vector<AtomId> generators_;
  std::vector<std::unique_ptr<AtomSet>> equal_cache_;
  std::vector<std::unique_ptr<RewriteSystem>> rewrite_cache_;
};

inline constexpr std::uint64_t kDefaultDecideCap = 12;

Decision decide_word_simple(const GroupPresentation& p, const ReducedWord& w, std::uint64_t cap);

/// Header `universe group <k>`, lines `relator <word>`.
GroupPresentation parse_group_file(std::istream& in);

}  // namespace qv::group

#endif  // QV_GROUP_HPP_
