// Quasivarieties over a finite universe {0, ..., n-1}, with exhaustive
// semantics. Subsets are bitmasks (bit i = atom i).

#ifndef QV_FINITE_HPP_
#define QV_FINITE_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "qv/engine.hpp"
#include "qv/operators.hpp"
#include "qv/types.hpp"

namespace qv::finite {

using Subset = std::uint32_t;

inline constexpr std::size_t kMaxPointsUniverse = 20;
inline constexpr std::size_t kMaxClassCheckUniverse = 16;

Subset full_set(std::size_t n);
Subset to_mask(const AtomSet& atoms);
AtomSet from_mask(Subset mask);
std::string format_subset(Subset mask);  // "{0,2}"

struct FiniteQuasivariety {
  std::size_t n = 0;
  std::vector<HornRule> rules;

  FiniteQuasivariety() = default;
  /// Validates indices and canonicalises the rule list (sorted, unique).
  FiniteQuasivariety(std::size_t n, std::vector<HornRule> rules);

  RuleStreamPtr stream() const;
  bool satisfies(Subset x) const;
};

/// Every point, by increasing bitmask. GuardError when n > 20.
std::vector<Subset> all_points(const FiniteQuasivariety& q);

/// Least point containing r (least fixpoint).
Subset brute_closure(const FiniteQuasivariety& q, Subset r);

/// Throw Error when an argument is not a point.
Subset meet(const FiniteQuasivariety& q, Subset x, Subset y);
Subset join(const FiniteQuasivariety& q, Subset x, Subset y);

/// Points X != I whose only strict superset among the points is I.
std::vector<Subset> maximal_points(const FiniteQuasivariety& q);

/// Y disjoint from X and meeting every point strictly above X.
bool is_discriminator(const FiniteQuasivariety& q, Subset x, Subset y);

/// Partial map taking value 1 on `ones` and 0 on `zeros`.
struct PartialMap {
  Subset ones = 0;
  Subset zeros = 0;
  bool agrees_with(Subset x) const { return (x & ones) == ones && (x & zeros) == 0; }
  friend bool operator==(const PartialMap&, const PartialMap&) = default;
};

struct PartialMapFamily {
  std::size_t n = 0;
  std::vector<PartialMap> maps;

  PartialMapFamily() = default;
  PartialMapFamily(std::size_t n, std::vector<PartialMap> maps);  // validates
  bool in_class(Subset x) const;
};

/// Outcome of the pi01 precondition: I is in the class and the class is
/// closed under pairwise intersection.
struct ClassCheck {
  bool ok = true;
  std::string reason;  // empty when ok
};

ClassCheck diagnose_class(const PartialMapFamily& fam);
bool check_intersection_closed(const PartialMapFamily& fam);

/// The class {X : X agrees with no map} as a rule set. Throws Error with the
/// witness when the precondition fails.
FiniteQuasivariety pi01_to_rules(const PartialMapFamily& fam);

/// eval(x, 0) = B if x in A, bottom otherwise; realises A <=_e B.
OperatorPtr brute_reduction(Subset a, Subset b, std::size_t n);

// File formats -------------------------------------------------------------

FiniteQuasivariety parse_rule_file(std::istream& in);
PartialMapFamily parse_partial_map_file(std::istream& in);
std::string format_rule_file(const FiniteQuasivariety& q);
std::string format_partial_map_file(const PartialMapFamily& fam);

/// Uniformly random instance with the given universe size and rule count;
/// each rule has 0..max_premises premises.
FiniteQuasivariety random_quasivariety(std::mt19937_64& rng, std::size_t n,
                                       std::size_t rule_count, std::size_t max_premises = 3);

}  // namespace qv::finite

#endif  // QV_FINITE_HPP_
