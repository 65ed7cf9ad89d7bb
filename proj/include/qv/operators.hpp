// Enumeration operators f : I x N -> P_f(I) + {bottom} and the reductions
// built from them.
//
// A operator f reduces A to B when x in A <=> exists n, f(x, n) subset B.
// Every operator is a pure, total eval. Because blind search over n is
// hopeless for derivation codes, operators may also propose witnesses:
// find_witnesses() returns candidate indices, and callers always re-check
// them with eval before emitting anything.

#ifndef QV_OPERATORS_HPP_
#define QV_OPERATORS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qv/engine.hpp"
#include "qv/types.hpp"

namespace qv {

/// nullopt is bottom.
using OperatorValue = std::optional<AtomSet>;

class EnumerationOperator {
 public:
  virtual ~EnumerationOperator() = default;

  virtual OperatorValue eval(AtomId x, const Natural& n) const = 0;

  /// For each goal x, tries to find n with eval(x, n) subset base + extra.
  /// `effort` bounds the search; its unit is operator specific. The default
  /// scans n < effort.
  virtual std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const;

  std::optional<Natural> find_witness(AtomId x, const AtomSet& available,
                                      std::uint64_t effort) const;
};

using OperatorPtr = std::shared_ptr<const EnumerationOperator>;

/// True iff v is not bottom and v subset base + extra.
bool value_within(const OperatorValue& v, const AtomSet& base,
                  std::span<const AtomId> extra = {});

/// Operator given by a lambda, with the default blind witness scan.
class LambdaOperator final : public EnumerationOperator {
 public:
  using Fn = std::function<OperatorValue(AtomId, const Natural&)>;
  explicit LambdaOperator(Fn fn) : fn_(std::move(fn)) {}
  OperatorValue eval(AtomId x, const Natural& n) const override { return fn_(x, n); }

 private:
  Fn fn_;
};

/// eval(x, 0) = {x}, bottom otherwise.
OperatorPtr identity_operator();

struct PresentationSearch {
  /// Cap on atoms processed per witness saturation (0 = unbounded).
  std::uint64_t max_processed = 1u << 20;
};

/// f(a, n) = derivation_decode(S, a, n). Witnesses come from a goal-directed
/// saturation in the stream's local neighbourhood of radius `effort`.
class PresentationOperator final : public EnumerationOperator {
 public:
  explicit PresentationOperator(RuleStreamPtr stream, PresentationSearch search = {})
      : stream_(std::move(stream)), search_(search) {}

  OperatorValue eval(AtomId x, const Natural& n) const override;
  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override;

  const RuleStream& stream() const { return *stream_; }

 private:
  RuleStreamPtr stream_;
  PresentationSearch search_;
};

std::shared_ptr<const PresentationOperator> presentation_operator(
    RuleStreamPtr stream, PresentationSearch search = {});

/// g(x, n) = f(a, n) \ {x}; for a maximal point X with a not in X.
OperatorPtr complement_op_maximal(OperatorPtr f, AtomId a);

/// g(x, <n_1..n_k>) = U_i f(a_i, n_i) \ {x}; A presents the top point I.
/// Throws Error if A is empty.
OperatorPtr complement_op_uniform(OperatorPtr f, std::vector<AtomId> top_presentation);

/// A computable family of finite sets S_p with |S_p| = size_at(p).
struct FiniteFamily {
  std::function<std::vector<AtomId>(std::uint64_t)> sets_at;
  std::function<std::uint64_t(std::uint64_t)> size_at;
};

/// g(x, pi(p, <n_1..n_h(p)>)) = U_i f(a^p_i, n_i) \ {x}. `max_probe` bounds
/// the family members tried by the witness search.
OperatorPtr complement_op_below_family(OperatorPtr f, FiniteFamily family,
                                       std::uint64_t max_probe = 64);

/// g(x, pi(m, n')) = f(y_m, n') \ {x}, y_m the m-th discriminator atom,
/// bottom unless y_m was emitted within (m + 1) * margin source steps.
OperatorPtr complement_op_discriminated(OperatorPtr f, AtomEnumeration discriminator,
                                        std::uint64_t margin = 64);

/// Blind dovetailing: stage s appends the next source atom (if any) to the
/// seen prefix, evaluates pair code s = pi(x.index, n), and emits every x
/// whose recorded value is now inside the prefix. `budget` stages.
AtomEnumeration apply_operator(const EnumerationOperator& f,
                               const AtomEnumeration& source, std::uint64_t budget);

struct GuidedApplication {
  AtomEnumeration emitted;
  std::map<AtomId, Natural> certificates;  // n with eval(x, n) subset source
};

/// Witness-guided application over an explicit candidate list against the
/// whole source prefix. Each certificate is re-checked with eval.
GuidedApplication apply_operator_guided(const EnumerationOperator& f,
                                        const AtomEnumeration& source,
                                        std::span<const AtomId> candidates,
                                        std::uint64_t effort);

/// Rules (f(x, n) => x) over all non-bottom pairs. With atom_bound b the
/// index i is split as x = i mod b, n = i / b; otherwise (x, n) = unpair(i).
RuleStreamPtr converse_presentation_rules(OperatorPtr f,
                                          std::optional<std::uint64_t> atom_bound);

/// Rules ({x} + f(x, n) => y) over all (x, n, y). With atom_bound b:
/// y = i mod b, x = (i / b) mod b, n = i / b^2; otherwise
/// (x, r) = unpair(i), (n, y) = unpair(r).
RuleStreamPtr converse_maximal_rules(OperatorPtr f, std::optional<std::uint64_t> atom_bound);

struct GMapEntry {
  AtomId x;
  Natural g_value;
  friend bool operator==(const GMapEntry&, const GMapEntry&) = default;
};

/// g(x) = min{n : f(x, n) subset X} computed from an enumeration of X, for
/// f realising complement(X) <=_e X. Candidates whose minimum cannot be
/// settled within `budget` index checks are withheld.
std::vector<GMapEntry> g_map(const EnumerationOperator& f, const AtomEnumeration& x_enum,
                             std::span<const AtomId> candidates, std::uint64_t budget,
                             std::uint64_t effort);

using BoundFunction = std::function<std::uint64_t(AtomId)>;

/// Emits x when every n <= h(x) has f(x, n) bottom or meeting the seen part
/// of the complement. Candidates with h(x) >= budget are withheld.
AtomEnumeration recover_from_bound(const EnumerationOperator& f, const BoundFunction& h,
                                   const AtomEnumeration& complement,
                                   std::span<const AtomId> candidates,
                                   std::uint64_t budget);

/// Stream rules of index < limit with all atoms below n, canonicalised.
std::vector<HornRule> materialize_rules(const RuleStream& stream, std::uint64_t n,
                                        std::uint64_t limit);

}  // namespace qv

#endif  // QV_OPERATORS_HPP_
