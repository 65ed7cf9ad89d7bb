#include "qv/operators.hpp"

#include <algorithm>
#include <unordered_map>

#include "qv/codec.hpp"

namespace qv {

bool value_within(const OperatorValue& v, const AtomSet& base,
                  std::span<const AtomId> extra) {
  if (!v) return false;
  for (auto a : *v) {
    if (base.count(a)) continue;
    if (std::find(extra.begin(), extra.end(), a) == extra.end()) return false;
  }
  return true;
}

std::vector<std::optional<Natural>> EnumerationOperator::find_witnesses(
    std::span<const AtomId> goals, const AtomSet& base,
    std::span<const AtomId> extra, std::uint64_t effort) const {
  std::vector<std::optional<Natural>> out;
  for (auto x : goals) {
    std::optional<Natural> found;
    for (std::uint64_t n = 0; n < effort && !found; ++n)
      if (value_within(eval(x, n), base, extra)) found = Natural(n);
    out.push_back(std::move(found));
  }
  return out;
}

std::optional<Natural> EnumerationOperator::find_witness(AtomId x, const AtomSet& available,
                                                         std::uint64_t effort) const {
  AtomId goal[1] = {x};
  return find_witnesses(goal, available, {}, effort).front();
}

OperatorPtr identity_operator() {
  return std::make_shared<LambdaOperator>([](AtomId x, const Natural& n) -> OperatorValue {
    if (n != 0) return std::nullopt;
    return AtomSet{x};
  });
}

// ---------------------------------------------------------------------------

std::shared_ptr<const PresentationOperator> presentation_operator(RuleStreamPtr stream,
                                                                  PresentationSearch search) {
  return std::make_shared<PresentationOperator>(std::move(stream), search);
}

OperatorValue PresentationOperator::eval(AtomId x, const Natural& n) const {
  return derivation_decode(*stream_, x, n);
}

std::vector<std::optional<Natural>> PresentationOperator::find_witnesses(
    std::span<const AtomId> goals, const AtomSet& base,
    std::span<const AtomId> extra, std::uint64_t effort) const {
  SaturationRequest req;
  if (extra.empty()) {
    // The base need not be closed; its atoms must fire rules themselves.
    req.seeds.assign(base.begin(), base.end());
  } else {
    req.base = &base;
    req.seeds.assign(extra.begin(), extra.end());
  }
  req.mode = SaturationMode::kLocal;
  req.limit = effort;
  req.goals.assign(goals.begin(), goals.end());
  req.max_processed = search_.max_processed;
  auto sat = saturate(*stream_, req);

  std::vector<std::optional<Natural>> out;
  for (auto g : goals) {
    auto d = sat.derivation_of(g);
    if (!d) {
      out.emplace_back();
      continue;
    }
    Natural code = codec::seq_encode(*d);
    if (value_within(eval(g, code), base, extra))
      out.emplace_back(std::move(code));
    else
      out.emplace_back();
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<AtomId> with_atom(std::span<const AtomId> extra, AtomId x) {
  std::vector<AtomId> v(extra.begin(), extra.end());
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  return v;
}

OperatorValue minus(OperatorValue v, AtomId x) {
  if (v) v->erase(x);
  return v;
}

class ComplementMaximal final : public EnumerationOperator {
 public:
  ComplementMaximal(OperatorPtr f, AtomId a) : f_(std::move(f)), a_(a) {}

  OperatorValue eval(AtomId x, const Natural& n) const override {
    return minus(f_->eval(a_, n), x);
  }

  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override {
    std::vector<std::optional<Natural>> out;
    AtomId target[1] = {a_};
    for (auto x : goals) {
      auto ext = with_atom(extra, x);
      auto w = f_->find_witnesses(target, base, ext, effort).front();
      if (w && !value_within(eval(x, *w), base, extra)) w.reset();
      out.push_back(std::move(w));
    }
    return out;
  }

 private:
  OperatorPtr f_;
  AtomId a_;
};

class ComplementUniform final : public EnumerationOperator {
 public:
  ComplementUniform(OperatorPtr f, std::vector<AtomId> top)
      : f_(std::move(f)), top_(std::move(top)) {}

  OperatorValue eval(AtomId x, const Natural& n) const override {
    auto parts = codec::tuple_decode(n, top_.size());
    AtomSet acc;
    for (std::size_t i = 0; i < top_.size(); ++i) {
      auto v = f_->eval(top_[i], parts[i]);
      if (!v) return std::nullopt;
      acc.insert(v->begin(), v->end());
    }
    acc.erase(x);
    return acc;
  }

  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override {
    std::vector<std::optional<Natural>> out;
    for (auto x : goals) {
      auto ext = with_atom(extra, x);
      auto ws = f_->find_witnesses(top_, base, ext, effort);
      std::optional<Natural> code;
      if (std::all_of(ws.begin(), ws.end(), [](const auto& w) { return w.has_value(); })) {
        std::vector<Natural> parts;
        for (auto& w : ws) parts.push_back(*w);
        code = codec::tuple_encode(parts);
        if (!value_within(eval(x, *code), base, extra)) code.reset();
      }
      out.push_back(std::move(code));
    }
    return out;
  }

 private:
  OperatorPtr f_;
  std::vector<AtomId> top_;
};

class ComplementBelowFamily final : public EnumerationOperator {
 public:
  ComplementBelowFamily(OperatorPtr f, FiniteFamily fam, std::uint64_t max_probe)
      : f_(std::move(f)), fam_(std::move(fam)), max_probe_(max_probe) {}

  OperatorValue eval(AtomId x, const Natural& n) const override {
    auto [p_big, rest] = codec::unpair(n);
    auto p = codec::to_u64(p_big);
    if (!p) return std::nullopt;
    auto k = fam_.size_at(*p);
    if (k == 0) {
      if (rest != 0) return std::nullopt;
      return AtomSet{};
    }
    auto members = fam_.sets_at(*p);
    auto parts = codec::tuple_decode(rest, k);
    AtomSet acc;
    for (std::size_t i = 0; i < k; ++i) {
      auto v = f_->eval(members[i], parts[i]);
      if (!v) return std::nullopt;
      acc.insert(v->begin(), v->end());
    }
    acc.erase(x);
    return acc;
  }

  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override {
    std::vector<std::optional<Natural>> out;
    for (auto x : goals) {
      auto ext = with_atom(extra, x);
      std::optional<Natural> code;
      for (std::uint64_t p = 0; p < max_probe_ && !code; ++p) {
        auto members = fam_.sets_at(p);
        if (members.empty()) {
          code = codec::pair(p, 0);
          break;
        }
        auto ws = f_->find_witnesses(members, base, ext, effort);
        if (!std::all_of(ws.begin(), ws.end(), [](const auto& w) { return w.has_value(); }))
          continue;
        std::vector<Natural> parts;
        for (auto& w : ws) parts.push_back(*w);
        Natural candidate = codec::pair(p, codec::tuple_encode(parts));
        if (value_within(eval(x, candidate), base, extra)) code = std::move(candidate);
      }
      out.push_back(std::move(code));
    }
    return out;
  }

 private:
  OperatorPtr f_;
  FiniteFamily fam_;
  std::uint64_t max_probe_;
};

class ComplementDiscriminated final : public EnumerationOperator {
 public:
  ComplementDiscriminated(OperatorPtr f, AtomEnumeration discr, std::uint64_t margin)
      : f_(std::move(f)), discr_(std::move(discr)), margin_(margin) {}

  std::optional<AtomId> nth(const Natural& m_big) const {
    auto m = codec::to_u64(m_big);
    if (!m || *m >= discr_.size()) return std::nullopt;
    const auto& e = discr_.log()[*m];
    unsigned __int128 allowed = static_cast<unsigned __int128>(*m + 1) * margin_;
    if (e.step >= allowed) return std::nullopt;
    return e.atom;
  }

  OperatorValue eval(AtomId x, const Natural& n) const override {
    auto [m, inner] = codec::unpair(n);
    auto y = nth(m);
    if (!y) return std::nullopt;
    return minus(f_->eval(*y, inner), x);
  }

  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override {
    std::vector<std::optional<Natural>> out;
    for (auto x : goals) {
      auto ext = with_atom(extra, x);
      std::optional<Natural> code;
      for (std::uint64_t m = 0; m < discr_.size() && !code; ++m) {
        auto y = nth(m);
        if (!y) continue;
        AtomId target[1] = {*y};
        auto w = f_->find_witnesses(target, base, ext, effort).front();
        if (!w) continue;
        Natural candidate = codec::pair(m, *w);
        if (value_within(eval(x, candidate), base, extra)) code = std::move(candidate);
      }
      out.push_back(std::move(code));
    }
    return out;
  }

 private:
  OperatorPtr f_;
  AtomEnumeration discr_;
  std::uint64_t margin_;
};

}  // namespace

OperatorPtr complement_op_maximal(OperatorPtr f, AtomId a) {
  return std::make_shared<ComplementMaximal>(std::move(f), a);
}

OperatorPtr complement_op_uniform(OperatorPtr f, std::vector<AtomId> top) {
  if (top.empty()) throw Error("complement_op_uniform: the top presentation is empty");
  return std::make_shared<ComplementUniform>(std::move(f), std::move(top));
}

OperatorPtr complement_op_below_family(OperatorPtr f, FiniteFamily fam, std::uint64_t max_probe) {
  return std::make_shared<ComplementBelowFamily>(std::move(f), std::move(fam), max_probe);
}

OperatorPtr complement_op_discriminated(OperatorPtr f, AtomEnumeration discr,
                                        std::uint64_t margin) {
  return std::make_shared<ComplementDiscriminated>(std::move(f), std::move(discr), margin);
}

// ---------------------------------------------------------------------------

AtomEnumeration apply_operator(const EnumerationOperator& f, const AtomEnumeration& source,
                               std::uint64_t budget) {
  AtomEnumeration out;
  AtomSet seen;
  std::size_t next = 0;
  std::vector<std::pair<AtomId, AtomSet>> pending;
  for (std::uint64_t s = 0; s < budget; ++s) {
    if (next < source.size()) seen.insert(source.log()[next++].atom);
    auto [xi, n] = codec::unpair(Natural(s));
    AtomId x{std::move(xi)};
    if (!out.contains(x))
      if (auto v = f.eval(x, n)) pending.emplace_back(x, std::move(*v));
    for (const auto& [px, pv] : pending)
      if (!out.contains(px) && is_subset(pv, seen)) out.emit(px, s);
    std::erase_if(pending, [&](const auto& p) { return out.contains(p.first); });
  }
  return out;
}

GuidedApplication apply_operator_guided(const EnumerationOperator& f,
                                        const AtomEnumeration& source,
                                        std::span<const AtomId> candidates,
                                        std::uint64_t effort) {
  GuidedApplication out;
  const AtomSet& seen = source.members();
  std::uint64_t step = 0;
  for (auto x : candidates) {
    ++step;
    if (out.emitted.contains(x)) continue;
    auto w = f.find_witness(x, seen, effort);
    if (!w || !value_within(f.eval(x, *w), seen)) continue;
    out.emitted.emit(x, step - 1);
    out.certificates.emplace(x, std::move(*w));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class ConversePresentationStream final : public RuleStream {
 public:
  ConversePresentationStream(OperatorPtr f, std::optional<std::uint64_t> bound)
      : f_(std::move(f)), bound_(bound) {}

  std::optional<HornRule> rule_at(RuleIndex i) const override {
    Natural x, n;
    if (bound_) {
      x = i % *bound_;
      n = i / *bound_;
    } else {
      std::tie(x, n) = codec::unpair(i);
    }
    auto v = f_->eval(AtomId{x}, n);
    if (!v) return std::nullopt;
    return HornRule(std::vector<AtomId>(v->begin(), v->end()), AtomId{x});
  }

 private:
  OperatorPtr f_;
  std::optional<std::uint64_t> bound_;
};

class ConverseMaximalStream final : public RuleStream {
 public:
  ConverseMaximalStream(OperatorPtr f, std::optional<std::uint64_t> bound)
      : f_(std::move(f)), bound_(bound) {}

  std::optional<HornRule> rule_at(RuleIndex i) const override {
    Natural x, n, y;
    if (bound_) {
      y = i % *bound_;
      x = (i / *bound_) % *bound_;
      n = i / *bound_ / *bound_;
    } else {
      Natural r;
      std::tie(x, r) = codec::unpair(i);
      std::tie(n, y) = codec::unpair(r);
    }
    auto v = f_->eval(AtomId{x}, n);
    if (!v) return std::nullopt;
    std::vector<AtomId> prem(v->begin(), v->end());
    prem.push_back(AtomId{x});
    return HornRule(std::move(prem), AtomId{y});
  }

 private:
  OperatorPtr f_;
  std::optional<std::uint64_t> bound_;
};

}  // namespace

RuleStreamPtr converse_presentation_rules(OperatorPtr f, std::optional<std::uint64_t> bound) {
  if (bound && *bound == 0) throw Error("atom bound must be positive");
  return std::make_shared<ConversePresentationStream>(std::move(f), bound);
}

RuleStreamPtr converse_maximal_rules(OperatorPtr f, std::optional<std::uint64_t> bound) {
  if (bound && *bound == 0) throw Error("atom bound must be positive");
  return std::make_shared<ConverseMaximalStream>(std::move(f), bound);
}

// ---------------------------------------------------------------------------

std::vector<GMapEntry> g_map(const EnumerationOperator& f, const AtomEnumeration& x_enum,
                             std::span<const AtomId> candidates, std::uint64_t budget,
                             std::uint64_t effort) {
  const AtomSet& seen = x_enum.members();
  std::unordered_map<AtomId, bool> certified;  // membership in the complement
  auto in_complement = [&](AtomId y) {
    auto it = certified.find(y);
    if (it != certified.end()) return it->second;
    auto w = f.find_witness(y, seen, effort);
    bool ok = w && value_within(f.eval(y, *w), seen);
    certified.emplace(y, ok);
    return ok;
  };

  std::vector<GMapEntry> out;
  for (auto x : candidates) {
    auto w = f.find_witness(x, seen, effort);
    if (!w || !value_within(f.eval(x, *w), seen)) continue;
    Natural best = *w;
    bool settled = true;
    std::uint64_t checks = 0;
    for (Natural i = 0; i < best; ++i) {
      if (++checks > budget) {
        settled = false;
        break;
      }
      auto v = f.eval(x, i);
      if (!v) continue;
      if (is_subset(*v, seen)) {
        best = i;
        break;
      }
      bool refuted = false;
      for (auto y : *v)
        if (!seen.count(y) && in_complement(y)) {
          refuted = true;
          break;
        }
      if (!refuted) {
        settled = false;
        break;
      }
    }
    if (settled) out.push_back({x, best});
  }
  return out;
}

AtomEnumeration recover_from_bound(const EnumerationOperator& f, const BoundFunction& h,
                                   const AtomEnumeration& complement,
                                   std::span<const AtomId> candidates, std::uint64_t budget) {
  AtomEnumeration out;
  const AtomSet& comp = complement.members();
  std::uint64_t step = 0;
  for (auto x : candidates) {
    ++step;
    std::uint64_t bound = h(x);
    if (bound >= budget) continue;
    bool member = true;
    for (std::uint64_t n = 0; n <= bound && member; ++n) {
      auto v = f.eval(x, n);
      if (!v) continue;
      member = std::any_of(v->begin(), v->end(), [&](AtomId y) { return comp.count(y) > 0; });
    }
    if (member) out.emit(x, step - 1);
  }
  return out;
}

std::vector<HornRule> materialize_rules(const RuleStream& stream, std::uint64_t n,
                                        std::uint64_t limit) {
  std::uint64_t end = limit;
  if (auto c = stream.declared_finite()) end = std::min(end, *c);
  std::vector<HornRule> out;
  for (std::uint64_t i = 0; i < end; ++i) {
    auto r = stream.rule_at(RuleIndex(i));
    if (!r || r->conclusion.index >= n) continue;
    if (std::any_of(r->premises.begin(), r->premises.end(),
                    [&](AtomId p) { return p.index >= n; }))
      continue;
    out.push_back(std::move(*r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace qv
