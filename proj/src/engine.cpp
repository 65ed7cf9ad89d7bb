#include "qv/engine.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "qv/codec.hpp"

namespace qv {

namespace {

// Prefix fetches are bounded in practice; indices past 2^64 are never scanned.
std::uint64_t prefix_end(const RuleStream& stream, const RuleIndex& limit) {
  RuleIndex end = limit;
  if (auto n = stream.declared_finite()) end = std::min<RuleIndex>(end, RuleIndex(*n));
  return small_index(end);
}

}  // namespace

void KnownAtoms::for_each_upto(std::uint64_t max_index,
                               const std::function<void(AtomId)>& fn) const {
  auto walk = [&](const AtomSet& s) {
    for (auto it = s.begin(); it != s.end() && it->index <= max_index; ++it) fn(*it);
  };
  if (base_ != nullptr) walk(*base_);
  walk(local_);
}

void KnownAtoms::for_each(const std::function<void(AtomId)>& fn) const {
  if (base_ != nullptr) for (auto a : *base_) fn(a);
  for (auto a : local_) fn(a);
}

void RuleStream::for_each_triggered(AtomId fresh, const KnownAtoms& known,
                                    RuleIndex limit, const RuleSink& sink) const {
  for (std::uint64_t i = 0, end = prefix_end(*this, limit); i < end; ++i) {
    auto r = rule_at(RuleIndex(i));
    if (!r) continue;
    bool has_fresh = false;
    bool others_known = true;
    for (auto p : r->premises) {
      if (p == fresh) {
        has_fresh = true;
      } else if (!known.contains(p)) {
        others_known = false;
        break;
      }
    }
    if (has_fresh && others_known) sink(RuleIndex(i), *r);
  }
}

void RuleStream::for_each_axiom(RuleIndex limit, const RuleSink& sink) const {
  for (std::uint64_t i = 0, end = prefix_end(*this, limit); i < end; ++i) {
    auto r = rule_at(RuleIndex(i));
    if (r && r->premises.empty()) sink(RuleIndex(i), *r);
  }
}

std::optional<HornRule> FiniteRuleStream::rule_at(RuleIndex i) const {
  if (i >= rules_.size()) return std::nullopt;
  return rules_[static_cast<std::size_t>(i)];
}

AtomEnumeration AtomEnumeration::from_atoms(std::span<const AtomId> atoms) {
  AtomEnumeration e;
  std::uint64_t step = 0;
  for (auto a : atoms)
    if (e.emit(a, step)) ++step;
  return e;
}

AtomEnumeration AtomEnumeration::from_set(const AtomSet& atoms) {
  std::vector<AtomId> v(atoms.begin(), atoms.end());
  return from_atoms(v);
}

bool AtomEnumeration::emit(AtomId a, std::uint64_t step) {
  if (!members_.insert(a).second) return false;
  log_.push_back({a, step});
  return true;
}

bool Saturation::contains(AtomId a) const {
  return derived_.contains(a) || (base_ != nullptr && base_->count(a) > 0);
}

std::optional<std::vector<RuleIndex>> Saturation::derivation_of(AtomId goal) const {
  if (!contains(goal)) return std::nullopt;
  std::vector<RuleIndex> out;
  std::unordered_set<AtomId> done;
  // Iterative post-order over the provenance DAG.
  struct Frame {
    AtomId atom;
    std::size_t next;
  };
  std::vector<Frame> stack;
  auto is_leaf = [&](AtomId a) { return origin_.find(a) == origin_.end(); };
  if (is_leaf(goal)) return out;
  stack.push_back({goal, 0});
  done.insert(goal);
  while (!stack.empty()) {
    auto& top = stack.back();
    const auto& origin = origin_.at(top.atom);
    if (top.next < origin.rule.premises.size()) {
      AtomId p = origin.rule.premises[top.next++];
      if (!is_leaf(p) && done.insert(p).second) stack.push_back({p, 0});
      continue;
    }
    out.push_back(origin.index);
    stack.pop_back();
  }
  return out;
}

namespace {

class SaturationRun {
 public:
  SaturationRun(const RuleStream& stream, const SaturationRequest& req,
                AtomEnumeration& derived,
                std::unordered_map<AtomId, HornRule>& origin_rule,
                std::unordered_map<AtomId, RuleIndex>& origin_index)
      : stream_(stream), req_(req), derived_(derived),
        origin_rule_(origin_rule), origin_index_(origin_index) {}

  bool in_base(AtomId a) const { return req_.base != nullptr && req_.base->count(a) > 0; }
  bool known(AtomId a) const { return in_base(a) || derived_.contains(a); }

  bool goals_met() const {
    if (req_.goals.empty()) return false;
    return std::all_of(req_.goals.begin(), req_.goals.end(),
                       [&](AtomId g) { return known(g); });
  }

  // Returns true when a new atom was emitted.
  bool add(AtomId a, const HornRule* rule, RuleIndex index) {
    if (known(a)) return false;
    derived_.emit(a, steps_);
    if (rule != nullptr) {
      origin_rule_.emplace(a, *rule);
      origin_index_.emplace(a, index);
    }
    queue_.push(a);
    return true;
  }

  std::uint64_t steps_ = 0;
  std::priority_queue<AtomId, std::vector<AtomId>, std::greater<>> queue_;

 private:
  const RuleStream& stream_;
  const SaturationRequest& req_;
  AtomEnumeration& derived_;
  std::unordered_map<AtomId, HornRule>& origin_rule_;
  std::unordered_map<AtomId, RuleIndex>& origin_index_;
};

}  // namespace

Saturation saturate(const RuleStream& stream, const SaturationRequest& req) {
  Saturation out;
  out.base_ = req.base;
  std::unordered_map<AtomId, HornRule> origin_rule;
  std::unordered_map<AtomId, RuleIndex> origin_index;
  SaturationRun run(stream, req, out.derived_, origin_rule, origin_index);

  std::vector<AtomId> seeds = req.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (const auto& s : seeds) run.add(s, nullptr, RuleIndex(0));

  bool stopped = run.goals_met();
  std::uint64_t processed = 0;

  const bool local = req.mode == SaturationMode::kLocal;
  const bool use_prefix = !stream.indexes_triggers() && !local;

  if (use_prefix && !stopped) {
    // Fetch the prefix once; fire a rule when its unmet-premise count hits 0.
    const std::uint64_t end = prefix_end(stream, req.limit);
    struct Entry {
      RuleIndex index;
      HornRule rule;
      std::size_t missing;
    };
    std::vector<Entry> rules;
    std::unordered_map<AtomId, std::vector<std::size_t>> uses;
    for (std::uint64_t i = 0; i < end; ++i) {
      auto r = stream.rule_at(RuleIndex(i));
      if (!r) continue;
      std::size_t missing = 0;
      for (auto p : r->premises)
        if (!run.in_base(p)) {
          ++missing;
          uses[p].push_back(rules.size());
        }
      rules.push_back({RuleIndex(i), std::move(*r), missing});
    }
    auto fire = [&](Entry& e) {
      ++run.steps_;
      run.add(e.rule.conclusion, &e.rule, e.index);
    };
    for (auto& e : rules) {
      if (e.missing == 0) fire(e);
      if ((stopped = run.goals_met())) break;
    }
    while (!stopped && !run.queue_.empty()) {
      if (req.max_processed != 0 && processed >= req.max_processed) break;
      AtomId a = run.queue_.top();
      run.queue_.pop();
      ++processed;
      auto it = uses.find(a);
      if (it == uses.end()) continue;
      for (auto idx : it->second) {
        if (--rules[idx].missing == 0) fire(rules[idx]);
        if ((stopped = run.goals_met())) break;
      }
    }
  } else if (!stopped) {
    KnownAtoms known(req.base);
    auto sink = [&](RuleIndex index, const HornRule& rule) {
      if (stopped) return;
      for (auto p : rule.premises)
        if (!known.contains(p)) return;
      ++run.steps_;
      if (run.add(rule.conclusion, &rule, index)) stopped = run.goals_met();
    };
    if (local)
      stream.for_each_local_axiom(req.limit, sink);
    else
      stream.for_each_axiom(req.limit, sink);
    while (!stopped && !run.queue_.empty()) {
      if (req.max_processed != 0 && processed >= req.max_processed) break;
      AtomId a = run.queue_.top();
      run.queue_.pop();
      ++processed;
      known.insert(a);
      if (local)
        stream.for_each_local(a, known, req.limit, sink);
      else
        stream.for_each_triggered(a, known, req.limit, sink);
    }
  }

  out.complete_ = run.queue_.empty() && !stopped;
  out.steps_ = run.steps_;
  for (auto& [a, r] : origin_rule) out.origin_.emplace(a, Saturation::Origin{origin_index.at(a), std::move(r)});
  return out;
}

ClosureResult closure(const AtomSet& presentation, const RuleStream& stream,
                      std::uint64_t budget) {
  SaturationRequest req;
  req.seeds.assign(presentation.begin(), presentation.end());
  req.limit = budget;
  auto sat = saturate(stream, req);
  ClosureResult out;
  out.derived = sat.derived();
  out.steps_used = sat.steps();
  auto n = stream.declared_finite();
  out.fixpoint_certified = n.has_value() && budget >= *n && sat.complete();
  return out;
}

std::optional<AtomSet> derivation_decode(const RuleStream& stream, AtomId a,
                                         const Natural& n) {
  if (n == 0) return AtomSet{a};
  AtomSet concluded;
  AtomSet leaves;
  std::optional<AtomId> last;
  for (const auto& k : codec::seq_decode(n)) {
    auto r = stream.rule_at(k);
    if (!r) return std::nullopt;
    for (auto p : r->premises)
      if (!concluded.count(p)) leaves.insert(p);
    concluded.insert(r->conclusion);
    last = r->conclusion;
  }
  if (last != a) return std::nullopt;
  return leaves;
}

}  // namespace qv
