// Horn saturation over computable rule streams.
//
// A RuleStream is the set S of a quasivariety: a deterministic map from
// stream indices to Horn rules. Saturation is semi-naive forward chaining:
// atoms are processed smallest index first, and processing an atom fires
// every rule that has it as a premise and whose other premises are already
// processed (or belong to the fixed base set).

#ifndef QV_ENGINE_HPP_
#define QV_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "qv/types.hpp"

namespace qv {

/// A fixed base set plus the atoms processed so far by a saturation.
class KnownAtoms {
 public:
  explicit KnownAtoms(const AtomSet* base = nullptr) : base_(base) {}

  bool contains(AtomId a) const {
    return local_.count(a) > 0 || (base_ != nullptr && base_->count(a) > 0);
  }
  void insert(AtomId a) { local_.insert(a); }

  /// Visits every known atom with index <= max_index, base first.
  void for_each_upto(std::uint64_t max_index,
                     const std::function<void(AtomId)>& fn) const;
  void for_each(const std::function<void(AtomId)>& fn) const;

  std::size_t size() const { return local_.size() + (base_ ? base_->size() : 0); }

 private:
  const AtomSet* base_;
  AtomSet local_;
};

using RuleSink = std::function<void(RuleIndex, const HornRule&)>;

class RuleStream {
 public:
  virtual ~RuleStream() = default;

  /// Pure: the rule at stream position i, or none.
  virtual std::optional<HornRule> rule_at(RuleIndex i) const = 0;

  /// Rule count when the stream is exhaustive (all indices >= count are none).
  virtual std::optional<std::uint64_t> declared_finite() const { return std::nullopt; }

  /// True if the stream implements for_each_triggered / for_each_axiom.
  /// Otherwise saturation fetches the prefix [0, limit) and indexes it.
  virtual bool indexes_triggers() const { return false; }

  /// Every rule with index < limit that has `fresh` among its premises and
  /// all other premises in `known`. Rules may be reported more than once.
  virtual void for_each_triggered(AtomId fresh, const KnownAtoms& known,
                                  RuleIndex limit, const RuleSink& sink) const;

  /// Premise-free rules with index < limit.
  virtual void for_each_axiom(RuleIndex limit, const RuleSink& sink) const;

  /// Neighbourhood explored by witness searches. `radius` is instance
  /// defined; the default treats it as an index limit.
  virtual void for_each_local(AtomId fresh, const KnownAtoms& known,
                              std::uint64_t radius, const RuleSink& sink) const {
    for_each_triggered(fresh, known, radius, sink);
  }
  virtual void for_each_local_axiom(std::uint64_t radius, const RuleSink& sink) const {
    for_each_axiom(radius, sink);
  }
};

using RuleStreamPtr = std::shared_ptr<const RuleStream>;

/// A finite list of rules, exhaustive (declared_finite = size).
class FiniteRuleStream final : public RuleStream {
 public:
  explicit FiniteRuleStream(std::vector<HornRule> rules) : rules_(std::move(rules)) {}
  std::optional<HornRule> rule_at(RuleIndex i) const override;
  std::optional<std::uint64_t> declared_finite() const override { return rules_.size(); }
  const std::vector<HornRule>& rules() const { return rules_; }

 private:
  std::vector<HornRule> rules_;
};

struct Emission {
  AtomId atom;
  std::uint64_t step;
  friend bool operator==(const Emission&, const Emission&) = default;
};

/// Duplicate-free, insertion-ordered set of atoms with emission steps.
class AtomEnumeration {
 public:
  AtomEnumeration() = default;
  static AtomEnumeration from_atoms(std::span<const AtomId> atoms);
  static AtomEnumeration from_set(const AtomSet& atoms);

  /// False (and no change) if the atom was already emitted.
  bool emit(AtomId a, std::uint64_t step);

  bool contains(AtomId a) const { return members_.count(a) > 0; }
  const std::vector<Emission>& log() const { return log_; }
  const AtomSet& members() const { return members_; }
  std::size_t size() const { return log_.size(); }
  bool empty() const { return log_.empty(); }

 private:
  std::vector<Emission> log_;
  AtomSet members_;
};

struct ClosureResult {
  AtomEnumeration derived;
  std::uint64_t steps_used = 0;
  bool fixpoint_certified = false;
};

/// All atoms derivable from R with rules of index < budget, saturated.
ClosureResult closure(const AtomSet& presentation, const RuleStream& stream,
                      std::uint64_t budget);

enum class SaturationMode {
  kIndexLimit,  // rules with stream index < limit
  kLocal,       // the stream's for_each_local neighbourhood at `limit`
};

struct SaturationRequest {
  const AtomSet* base = nullptr;  // closed set the saturation extends
  std::vector<AtomId> seeds;
  SaturationMode mode = SaturationMode::kIndexLimit;
  std::uint64_t limit = 0;
  std::vector<AtomId> goals;       // stop once all goals are known
  std::uint64_t max_processed = 0; // 0 = unbounded
};

/// Result of a saturation. Derived atoms exclude the base. Every rule-derived
/// atom records the first rule that produced it.
class Saturation {
 public:
  const AtomEnumeration& derived() const { return derived_; }
  bool contains(AtomId a) const;
  bool complete() const { return complete_; }
  std::uint64_t steps() const { return steps_; }

  /// Stream indices of a derivation of `goal` whose leaves lie in the base
  /// or the seeds, ordered so that every premise is concluded before use.
  /// Empty when the goal is itself a leaf; nullopt when the goal is unknown.
  std::optional<std::vector<RuleIndex>> derivation_of(AtomId goal) const;

 private:
  friend Saturation saturate(const RuleStream&, const SaturationRequest&);

  struct Origin {
    RuleIndex index;
    HornRule rule;
  };

  const AtomSet* base_ = nullptr;
  AtomEnumeration derived_;
  std::unordered_map<AtomId, Origin> origin_;
  bool complete_ = false;
  std::uint64_t steps_ = 0;
};

Saturation saturate(const RuleStream& stream, const SaturationRequest& request);

/// Decodes n as a sequence of stream indices and replays it (see
/// presentation_operator). bottom (nullopt) when n encodes no derivation of a.
std::optional<AtomSet> derivation_decode(const RuleStream& stream, AtomId a,
                                         const Natural& n);

}  // namespace qv

#endif  // QV_ENGINE_HPP_
