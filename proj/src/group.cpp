#include "qv/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <set>

#include "qv/codec.hpp"
#include "qv/text.hpp"

namespace qv::group {

namespace {

using u128 = unsigned __int128;

std::optional<std::uint64_t> checked(u128 v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

std::optional<std::uint64_t> checked_count(std::size_t k, std::size_t len) {
  if (len == 0) return 1;
  u128 v = 2 * k;
  for (std::size_t i = 1; i < len; ++i) {
    v *= 2 * k - 1;
    if (v > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return checked(v);
}

std::optional<std::uint64_t> offset_of(std::size_t k, std::size_t len) {
  u128 total = 0;
  for (std::size_t l = 0; l < len; ++l) {
    auto c = checked_count(k, l);
    if (!c) return std::nullopt;
    total += *c;
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return checked(total);
}

}  // namespace

ReducedWord ReducedWord::reduce(const std::vector<Letter>& letters) {
  ReducedWord w;
  for (auto c : letters) {
    if (!w.letters_.empty() && w.letters_.back() == inverse_letter(c))
      w.letters_.pop_back();
    else
      w.letters_.push_back(c);
  }
  return w;
}

ReducedWord ReducedWord::generator(std::size_t i, bool inv) {
  return reduce({static_cast<Letter>(2 * i + (inv ? 1 : 0))});
}

ReducedWord product(const ReducedWord& u, const ReducedWord& v) {
  std::vector<Letter> all = u.letters();
  all.insert(all.end(), v.letters().begin(), v.letters().end());
  return ReducedWord::reduce(all);
}

ReducedWord inverse(const ReducedWord& w) {
  std::vector<Letter> out(w.letters().rbegin(), w.letters().rend());
  for (auto& c : out) c = inverse_letter(c);
  return ReducedWord::reduce(out);
}

ReducedWord conjugate(const ReducedWord& w, const ReducedWord& h) {
  return product(product(h, w), inverse(h));
}

ReducedWord parse_word(const std::string& text, std::size_t k) {
  if (text == "1" || text == "-") return {};
  if (text.empty()) throw ParseError("empty word; write '1' for the identity");
  std::vector<Letter> letters;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (!std::isalpha(c)) throw ParseError(std::string("unexpected character '") + ch + "' in word");
    std::size_t g = static_cast<std::size_t>(std::tolower(c) - 'a');
    if (g >= k)
      throw ParseError(std::string("generator '") + ch + "' out of range for k = " + std::to_string(k));
    letters.push_back(static_cast<Letter>(2 * g + (std::isupper(c) ? 1 : 0)));
  }
  return ReducedWord::reduce(letters);
}

std::string format_word(const ReducedWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (auto c : w.letters()) {
    char base = static_cast<char>('a' + c / 2);
    s.push_back(c % 2 ? static_cast<char>(std::toupper(base)) : base);
  }
  return s;
}

std::uint64_t count_of_length(std::size_t k, std::size_t len) {
  auto c = checked_count(k, len);
  if (!c) throw RangeError("word count exceeds 64 bits");
  return *c;
}

std::uint64_t count_upto(std::size_t k, std::size_t len) {
  auto c = offset_of(k, len + 1);
  if (!c) throw RangeError("word count exceeds 64 bits");
  return *c;
}

std::optional<std::uint64_t> rank(const ReducedWord& w, std::size_t k) {
  const auto& ls = w.letters();
  auto off = offset_of(k, ls.size());
  if (!off) return std::nullopt;
  if (ls.empty()) return 0;
  const u128 q = 2 * k - 1;
  u128 value = ls[0];
  for (std::size_t j = 1; j < ls.size(); ++j) {
    Letter forbidden = inverse_letter(ls[j - 1]);
    u128 d = ls[j] - (ls[j] > forbidden ? 1 : 0);
    value = value * q + d;
    if (value > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return checked(value + *off);
}

ReducedWord unrank(std::uint64_t i, std::size_t k) {
  std::size_t len = 0;
  u128 start = 0;
  for (;; ++len) {
    auto c = checked_count(k, len);
    u128 count = c ? *c : std::numeric_limits<u128>::max() / 4;
    if (i < start + count) break;
    start += count;
  }
  if (len == 0) return {};
  const u128 q = 2 * k - 1;
  u128 value = i - start;
  std::vector<u128> digits(len);
  for (std::size_t j = len; j-- > 1;) {
    digits[j] = value % q;
    value /= q;
  }
  digits[0] = value;
  std::vector<Letter> ls(len);
  ls[0] = static_cast<Letter>(digits[0]);
  for (std::size_t j = 1; j < len; ++j) {
    Letter forbidden = inverse_letter(ls[j - 1]);
    auto d = static_cast<Letter>(digits[j]);
    ls[j] = d >= forbidden ? d + 1 : d;
  }
  return ReducedWord::reduce(ls);
}

AtomId atom_of(const ReducedWord& w, std::size_t k) {
  auto r = rank(w, k);
  if (!r) throw RangeError("word rank exceeds 64 bits");
  return AtomId{*r};
}

ReducedWord word_of(AtomId a, std::size_t k) { return unrank(small_index(a), k); }

std::vector<ReducedWord> ball(std::size_t k, std::size_t len) {
  std::vector<ReducedWord> out;
  std::uint64_t n = count_upto(k, len);
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(unrank(i, k));
  return out;
}

// ---------------------------------------------------------------------------

RuleIndex inverse_rule_index(std::uint64_t w) { return 1 + 3 * Natural(w); }

RuleIndex product_rule_index(std::uint64_t g, std::uint64_t h) {
  return 2 + 3 * codec::pair(Natural(g), Natural(h));
}

RuleIndex conjugation_rule_index(std::uint64_t g, std::uint64_t h) {
  return 3 + 3 * codec::pair(Natural(g), Natural(h));
}

namespace {

// Largest h with pair(g, h) <= jmax, or nullopt if none.
std::optional<std::uint64_t> partner_bound(std::uint64_t g, std::uint64_t jmax) {
  if (codec::try_pair64(g, 0).value_or(std::numeric_limits<std::uint64_t>::max()) > jmax)
    return std::nullopt;
  std::uint64_t lo = 0, hi = 1;
  while (codec::try_pair64(g, hi).value_or(std::numeric_limits<std::uint64_t>::max()) <= jmax) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (codec::try_pair64(g, mid).value_or(std::numeric_limits<std::uint64_t>::max()) <= jmax)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Largest s with s (s + 1) / 2 <= n.
std::uint64_t triangular_root(std::uint64_t n) {
  auto s = static_cast<std::uint64_t>(std::sqrt(2.0L * static_cast<long double>(n)));
  auto tri = [](std::uint64_t x) { return static_cast<u128>(x) * (x + 1) / 2; };
  while (s > 0 && tri(s) > n) --s;
  while (tri(s + 1) <= n) ++s;
  return s;
}

class GroupRules final : public RuleStream {
 public:
  explicit GroupRules(std::size_t k) : k_(k) {}

  std::optional<HornRule> rule_at(RuleIndex i) const override {
    if (i == 0) return HornRule({}, AtomId{0});
    const RuleIndex ip = i - 1;
    const RuleIndex jn = ip / 3;
    try {
      switch (static_cast<int>(ip % 3)) {
        case 0: {
          const std::uint64_t j = small_index(jn);
          auto w = unrank(j, k_);
          auto c = rank(inverse(w), k_);
          if (!c) return std::nullopt;
          return HornRule({AtomId{j}}, AtomId{*c});
        }
        case 1: {
          auto [gn, hn] = codec::unpair(jn);
          const std::uint64_t g = small_index(gn), h = small_index(hn);
          auto c = rank(product(unrank(g, k_), unrank(h, k_)), k_);
          if (!c) return std::nullopt;
          return HornRule({AtomId{g}, AtomId{h}}, AtomId{*c});
        }
        default: {
          auto [gn, hn] = codec::unpair(jn);
          const std::uint64_t g = small_index(gn), h = small_index(hn);
          auto c = rank(conjugate(unrank(g, k_), unrank(h, k_)), k_);
          if (!c) return std::nullopt;
          return HornRule({AtomId{g}}, AtomId{*c});
        }
      }
    } catch (const RangeError&) {
      return std::nullopt;
    }
  }

  bool indexes_triggers() const override { return true; }

  void for_each_axiom(RuleIndex limit, const RuleSink& sink) const override {
    if (limit > 0) sink(RuleIndex(0), HornRule({}, AtomId{0}));
  }

  void for_each_local_axiom(std::uint64_t, const RuleSink& sink) const override {
    sink(RuleIndex(0), HornRule({}, AtomId{0}));
  }

  void for_each_triggered(AtomId fresh, const KnownAtoms& known, RuleIndex limit,
                          const RuleSink& sink) const override {
    if (limit <= 1) return;
    const std::uint64_t r = small_index(fresh);
    ReducedWord v = unrank(r, k_);
    auto emit = [&](const RuleIndex& idx, std::vector<AtomId> prem, const ReducedWord& c) {
      if (idx >= limit) return;
      auto rc = rank(c, k_);
      if (!rc) return;
      sink(idx, HornRule(std::move(prem), AtomId{*rc}));
    };
    emit(inverse_rule_index(r), {fresh}, inverse(v));

    // pair codes j with some index < limit
    const std::uint64_t jmax = small_index(std::min<Natural>((limit - 1) / 3, std::numeric_limits<std::uint64_t>::max()));
    if (auto hb = partner_bound(r, jmax)) {
      known.for_each_upto(*hb, [&](AtomId h) {
        emit(product_rule_index(r, small_index(h)), {fresh, h}, product(v, word_of(h, k_)));
      });
      for (std::uint64_t h = 0; h <= *hb; ++h)
        emit(conjugation_rule_index(r, h), {fresh}, conjugate(v, unrank(h, k_)));
    }
    // fresh as the right factor: pair(g, r) <= jmax needs (g + r)(g + r + 1) / 2 <= jmax
    std::uint64_t sum = triangular_root(jmax);
    if (sum < r) return;
    known.for_each_upto(sum - r, [&](AtomId g) {
      emit(product_rule_index(small_index(g), r), {g, fresh}, product(word_of(g, k_), v));
    });
  }

  void for_each_local(AtomId fresh, const KnownAtoms& known, std::uint64_t radius,
                      const RuleSink& sink) const override {
    ReducedWord v;
    std::uint64_t r = 0;
    try {
      r = small_index(fresh);
      v = unrank(r, k_);
    } catch (const RangeError&) {
      return;
    }
    auto emit = [&](const RuleIndex& idx, std::vector<AtomId> prem, const ReducedWord& c) {
      if (c.size() > radius) return;
      auto rc = rank(c, k_);
      if (!rc) return;
      sink(idx, HornRule(std::move(prem), AtomId{*rc}));
    };
    emit(inverse_rule_index(r), {fresh}, inverse(v));
    for (std::size_t g = 0; g < k_; ++g)
      for (bool inv : {false, true}) {
        auto x = ReducedWord::generator(g, inv);
        emit(conjugation_rule_index(r, *rank(x, k_)), {fresh}, conjugate(v, x));
      }

    const std::size_t small = std::max<std::size_t>(1, radius / 3);
    known.for_each_upto(count_upto(k_, small) - 1, [&](AtomId u) {
      auto uw = word_of(u, k_);
      emit(product_rule_index(r, small_index(u)), {fresh, u}, product(v, uw));
      emit(product_rule_index(small_index(u), r), {u, fresh}, product(uw, v));
    });

    // Products landing on a short word t: v * (v^-1 t) and (t v^-1) * v.
    const ReducedWord vinv = inverse(v);
    for (const auto& t : short_ball(small)) {
      auto right = product(vinv, t);
      if (right.size() <= radius)
        if (auto rr = rank(right, k_); rr && known.contains(AtomId{*rr}))
          emit(product_rule_index(r, *rr), {fresh, AtomId{*rr}}, t);
      auto left = product(t, vinv);
      if (left.size() <= radius)
        if (auto rl = rank(left, k_); rl && known.contains(AtomId{*rl}))
          emit(product_rule_index(*rl, r), {AtomId{*rl}, fresh}, t);
    }
  }

 private:
  const std::vector<ReducedWord>& short_ball(std::size_t len) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = balls_[len];
    if (slot.empty()) slot = ball(k_, len);
    return slot;
  }

  std::size_t k_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::vector<ReducedWord>> balls_;
};

}  // namespace

RuleStreamPtr group_rules(std::size_t k) {
  if (k == 0) throw Error("a marked group needs at least one generator");
  if (k > 26) throw Error("at most 26 generators are supported");
  return std::make_shared<GroupRules>(k);
}

GroupPresentation icosahedral_presentation() {
  return {2, {parse_word("aa", 2), parse_word("bbb", 2), parse_word("ababababab", 2)}};
}

// ---------------------------------------------------------------------------

PermOracle::PermOracle(const GroupPresentation& p, std::vector<Perm> images)
    : images_(std::move(images)) {
  if (images_.size() != p.k) throw Error("expected one permutation per generator");
  degree_ = images_.empty() ? 0 : images_.front().size();
  for (const auto& img : images_) {
    if (img.size() != degree_) throw Error("permutations of different degrees");
    std::vector<bool> hit(degree_, false);
    for (auto x : img) {
      if (x >= degree_ || hit[x]) throw Error("image is not a permutation");
      hit[x] = true;
    }
  }
  for (const auto& r : p.relators)
    if (!word_is_identity(r)) throw Error("relator " + format_word(r) + " is not satisfied");

  std::vector<Perm> todo{identity()};
  index_.emplace(identity(), 0);
  elements_.push_back(identity());
  while (!todo.empty()) {
    Perm x = todo.back();
    todo.pop_back();
    for (const auto& g : images_) {
      Perm y = compose(x, g);
      if (index_.emplace(y, elements_.size()).second) {
        elements_.push_back(y);
        todo.push_back(y);
      }
    }
  }
}

Perm PermOracle::identity() const {
  Perm id(degree_);
  for (std::size_t i = 0; i < degree_; ++i) id[i] = static_cast<std::uint8_t>(i);
  return id;
}

Perm PermOracle::compose(const Perm& x, const Perm& y) const {
  Perm out(degree_);
  for (std::size_t i = 0; i < degree_; ++i) out[i] = y[x[i]];
  return out;
}

Perm PermOracle::invert(const Perm& x) const {
  Perm out(degree_);
  for (std::size_t i = 0; i < degree_; ++i) out[x[i]] = static_cast<std::uint8_t>(i);
  return out;
}

Perm PermOracle::evaluate(const ReducedWord& w) const {
  Perm p = identity();
  for (auto c : w.letters()) {
    const Perm& g = images_.at(c / 2);
    p = compose(p, c % 2 ? invert(g) : g);
  }
  return p;
}

bool PermOracle::word_is_identity(const ReducedWord& w) const { return evaluate(w) == identity(); }

PermOracle icosahedral_oracle() {
  auto p = icosahedral_presentation();
  Perm base{0, 1, 2, 3, 4};
  std::vector<Perm> all;
  do all.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));
  auto power_is_id = [](const Perm& x, int n) {
    Perm y{0, 1, 2, 3, 4};
    for (int i = 0; i < n; ++i) {
      Perm z(5);
      for (int j = 0; j < 5; ++j) z[j] = x[y[j]];
      y = z;
    }
    return y == Perm{0, 1, 2, 3, 4};
  };
  const Perm id{0, 1, 2, 3, 4};
  for (const auto& a : all) {
    if (a == id || !power_is_id(a, 2)) continue;
    for (const auto& b : all) {
      if (b == id || !power_is_id(b, 3)) continue;
      Perm ab(5);
      for (int j = 0; j < 5; ++j) ab[j] = b[a[j]];
      if (!power_is_id(ab, 5)) continue;
      PermOracle o(p, {a, b});
      if (o.order() == 60) return o;
    }
  }
  throw Error("no degree-5 representation found");
}

// ---------------------------------------------------------------------------

namespace {

// Elements at Cayley distance < p from the identity, generators and inverses.
std::set<std::size_t> cayley_ball(const PermOracle& o, std::uint64_t p) {
  std::set<std::size_t> seen{o.index_of(o.identity())};
  std::vector<std::size_t> frontier(seen.begin(), seen.end());
  for (std::uint64_t step = 1; step < p && !frontier.empty(); ++step) {
    std::vector<std::size_t> next;
    for (auto e : frontier)
      for (const auto& g : o.images())
        for (const auto& s : {g, o.invert(g)}) {
          auto y = o.index_of(o.compose(o.elements()[e], s));
          if (seen.insert(y).second) next.push_back(y);
        }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

bool generators_reached(const PermOracle& o, const ReducedWord& w, std::uint64_t t) {
  if (t == 0) return false;
  const Perm e = o.evaluate(w);
  const Perm e_inv = o.invert(e);
  std::set<std::size_t> conj;
  for (auto h : cayley_ball(o, t)) {
    const Perm& hp = o.elements()[h];
    const Perm hinv = o.invert(hp);
    conj.insert(o.index_of(o.compose(o.compose(hp, e), hinv)));
    conj.insert(o.index_of(o.compose(o.compose(hp, e_inv), hinv)));
  }
  std::set<std::size_t> reached{o.index_of(o.identity())};
  std::set<std::size_t> frontier = reached;
  for (std::uint64_t step = 1; step < t; ++step) {
    std::set<std::size_t> next;
    for (auto x : frontier)
      for (auto c : conj) {
        auto y = o.index_of(o.compose(o.elements()[x], o.elements()[c]));
        if (reached.insert(y).second) next.insert(y);
      }
    frontier = std::move(next);
  }
  return std::all_of(o.images().begin(), o.images().end(),
                     [&](const Perm& g) { return reached.count(o.index_of(g)) > 0; });
}

std::optional<std::uint64_t> g1_value(const PermOracle& o, const ReducedWord& w, std::uint64_t p_max) {
  if (o.word_is_identity(w)) return std::nullopt;
  for (std::uint64_t p = 1; p <= p_max; ++p)
    if (generators_reached(o, w, p)) return p;
  throw Error("g1 exceeds p_max = " + std::to_string(p_max) + " for " + format_word(w));
}

SimplicityProfile simplicity_profile(const PermOracle& o, std::size_t n_max, std::uint64_t p_max) {
  const std::size_t k = o.images().size();
  SimplicityProfile out;
  out.g1_prime.assign(n_max + 1, 0);
  std::set<Perm> seen;
  for (const auto& w : ball(k, n_max)) {
    Perm e = o.evaluate(w);
    if (!seen.insert(e).second || e == o.identity()) continue;
    auto g = *g1_value(o, w, p_max);
    out.g1.emplace_back(w, g);
    for (std::size_t n = w.size(); n <= n_max; ++n) out.g1_prime[n] = std::max(out.g1_prime[n], g);
  }
  return out;
}

FiniteFamily z_family() {
  FiniteFamily fam;
  fam.sets_at = [](std::uint64_t p) {
    ReducedWord w = ReducedWord::reduce(std::vector<Letter>(p + 1, 0));
    return std::vector<AtomId>{atom_of(w, 1)};
  };
  fam.size_at = [](std::uint64_t) -> std::uint64_t { return 1; };
  return fam;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kEqual: return "Equal";
    case Verdict::kNotEqual: return "NotEqual";
    default: return "Undecided";
  }
}

struct GroupWordDecider::RewriteSystem {
  struct Entry {
    std::vector<Letter> rhs;
    AtomId relator;  // lhs rhs^-1
  };
  std::map<std::vector<Letter>, Entry> rules;
  std::size_t max_lhs = 0;
};

namespace {

bool shortlex_less(const std::vector<Letter>& x, const std::vector<Letter>& y) {
  if (x.size() != y.size()) return x.size() < y.size();
  return x < y;
}

constexpr std::size_t kMaxSearchStates = 4096;

// Derivations from {w} over a fixed base, recorded as a DAG.
class RewriteSearch {
 public:
  RewriteSearch(const GroupWordDecider::RewriteSystem& rs, const AtomSet& base, std::size_t k,
                std::size_t max_len, AtomId seed)
      : rs_(rs), base_(base), k_(k), max_len_(max_len), seed_(seed) {}

  struct State {
    ReducedWord word;
    AtomId atom;
  };

  // Records the rule unless the conclusion is already available.
  AtomId derive(RuleIndex idx, std::vector<AtomId> premises, const ReducedWord& conclusion) {
    AtomId c = atom_of(conclusion, k_);
    if (c != seed_ && !base_.count(c) && !steps_.count(c)) steps_.emplace(c, Step{idx, std::move(premises)});
    return c;
  }

  std::optional<State> normalize(State s) {
    for (;;) {
      if (s.word.size() > max_len_) return std::nullopt;
      auto hit = find_rule(s.word.letters());
      if (!hit) return s;
      auto [start, entry] = *hit;
      const auto& v = s.word.letters();
      ReducedWord z = word_of(entry->relator, k_);
      ReducedWord zi = inverse(z);
      AtomId zi_atom = derive(inverse_rule_index(small_index(entry->relator)), {entry->relator}, zi);
      ReducedWord prefix = ReducedWord::reduce(std::vector<Letter>(v.begin(), v.begin() + start));
      ReducedWord c = zi;
      AtomId c_atom = zi_atom;
      if (!prefix.empty()) {
        c = conjugate(zi, prefix);
        c_atom = derive(conjugation_rule_index(small_index(zi_atom), *rank(prefix, k_)), {zi_atom}, c);
      }
      ReducedWord next = product(c, s.word);
      AtomId n_atom = derive(product_rule_index(small_index(c_atom), small_index(s.atom)), {c_atom, s.atom}, next);
      s = State{std::move(next), n_atom};
    }
  }

  std::vector<RuleIndex> derivation_of(AtomId goal) const {
    std::vector<RuleIndex> out;
    std::set<AtomId> done;
    std::vector<std::pair<AtomId, bool>> stack{{goal, false}};
    while (!stack.empty()) {
      auto [a, expanded] = stack.back();
      stack.pop_back();
      auto it = steps_.find(a);
      if (it == steps_.end() || done.count(a)) continue;
      if (expanded) {
        done.insert(a);
        out.push_back(it->second.index);
        continue;
      }
      stack.push_back({a, true});
      for (auto p : it->second.premises)
        if (!done.count(p)) stack.push_back({p, false});
    }
    return out;
  }

 private:
  struct Step {
    RuleIndex index;
    std::vector<AtomId> premises;
  };

  std::optional<std::pair<std::size_t, const GroupWordDecider::RewriteSystem::Entry*>> find_rule(
      const std::vector<Letter>& v) const {
    for (std::size_t end = 1; end <= v.size(); ++end) {
      std::size_t longest = std::min(end, rs_.max_lhs);
      for (std::size_t len = longest; len >= 1; --len) {
        std::vector<Letter> key(v.begin() + (end - len), v.begin() + end);
        auto it = rs_.rules.find(key);
        if (it != rs_.rules.end()) return std::make_pair(end - len, &it->second);
      }
    }
    return std::nullopt;
  }

  const GroupWordDecider::RewriteSystem& rs_;
  const AtomSet& base_;
  std::size_t k_;
  std::size_t max_len_;
  AtomId seed_;
  std::unordered_map<AtomId, Step> steps_;
};

}  // namespace

GroupWordDecider::GroupWordDecider(GroupPresentation p, std::uint64_t cap, std::uint64_t start_radius)
    : p_(std::move(p)), cap_(cap), start_radius_(start_radius), stream_(group_rules(p_.k)) {
  for (std::size_t i = 0; i < p_.k; ++i) generators_.push_back(atom_of(ReducedWord::generator(i), p_.k));
  complement_ = complement_op_uniform(presentation_operator(stream_), generators_);
}

GroupWordDecider::~GroupWordDecider() = default;

const AtomSet& GroupWordDecider::equal_side(std::uint64_t tick) {
  while (equal_cache_.size() <= tick) {
    SaturationRequest req;
    for (const auto& r : p_.relators) req.seeds.push_back(atom_of(r, p_.k));
    req.mode = SaturationMode::kLocal;
    req.limit = radius(equal_cache_.size());
    auto sat = saturate(*stream_, req);
    equal_cache_.push_back(std::make_unique<AtomSet>(sat.derived().members()));
  }
  return *equal_cache_[tick];
}

const GroupWordDecider::RewriteSystem& GroupWordDecider::rewrite_system(std::uint64_t tick) {
  while (rewrite_cache_.size() <= tick) {
    auto rs = std::make_unique<RewriteSystem>();
    for (auto z : equal_side(rewrite_cache_.size())) {
      const auto letters = word_of(z, p_.k).letters();
      for (std::size_t i = 1; i <= letters.size(); ++i) {
        std::vector<Letter> lhs(letters.begin(), letters.begin() + i);
        auto rhs = inverse(ReducedWord::reduce({letters.begin() + i, letters.end()})).letters();
        if (!shortlex_less(rhs, lhs)) continue;
        auto it = rs->rules.find(lhs);
        if (it == rs->rules.end()) {
          rs->max_lhs = std::max(rs->max_lhs, lhs.size());
          rs->rules.emplace(std::move(lhs), RewriteSystem::Entry{std::move(rhs), z});
        } else if (shortlex_less(rhs, it->second.rhs)) {
          it->second = RewriteSystem::Entry{std::move(rhs), z};
        }
      }
    }
    rewrite_cache_.push_back(std::move(rs));
  }
  return *rewrite_cache_[tick];
}

std::optional<Natural> GroupWordDecider::certify(AtomId x, std::uint64_t tick) {
  const AtomSet& known = equal_side(tick);
  const std::size_t k = p_.k;
  const std::size_t max_len = 2 * radius(tick) + 2;
  RewriteSearch search(rewrite_system(tick), known, k, max_len, x);

  std::vector<RewriteSearch::State> states;
  std::set<ReducedWord> seen;
  std::set<AtomId> goals_left(generators_.begin(), generators_.end());
  auto push = [&](std::optional<RewriteSearch::State> s) {
    if (!s || s->word.empty() || !seen.insert(s->word).second) return;
    goals_left.erase(s->atom);
    states.push_back(std::move(*s));
  };

  ReducedWord w = word_of(x, k);
  if (w.size() > max_len) return std::nullopt;
  push(search.normalize({w, x}));
  for (std::size_t i = 0; i < states.size() && !goals_left.empty(); ++i) {
    if (states.size() > kMaxSearchStates) return std::nullopt;
    const auto s = states[i];
    push(search.normalize(
        {inverse(s.word), search.derive(inverse_rule_index(small_index(s.atom)), {s.atom}, inverse(s.word))}));
    for (Letter c = 0; c < 2 * k && goals_left.size(); ++c) {
      ReducedWord h = ReducedWord::reduce({c});
      ReducedWord cw = conjugate(s.word, h);
      push(search.normalize(
          {cw, search.derive(conjugation_rule_index(small_index(s.atom), *rank(h, k)), {s.atom}, cw)}));
    }
    for (std::size_t j = 0; j <= i && goals_left.size(); ++j) {
      const auto t = states[j];
      ReducedWord st = product(s.word, t.word);
      push(search.normalize(
          {st, search.derive(product_rule_index(small_index(s.atom), small_index(t.atom)), {s.atom, t.atom}, st)}));
      ReducedWord ts = product(t.word, s.word);
      push(search.normalize(
          {ts, search.derive(product_rule_index(small_index(t.atom), small_index(s.atom)), {t.atom, s.atom}, ts)}));
    }
  }
  if (!goals_left.empty()) return std::nullopt;

  std::vector<Natural> codes;
  for (auto g : generators_) codes.push_back(codec::seq_encode(search.derivation_of(g)));
  Natural n = codec::tuple_encode(codes);
  if (!value_within(complement_->eval(x, n), known)) return std::nullopt;
  return n;
}

Decision GroupWordDecider::decide(const ReducedWord& w) {
  auto r = rank(w, p_.k);
  if (!r) return {Verdict::kUndecided, 0};
  const AtomId x{*r};
  for (std::uint64_t t = 0; t < cap_; ++t) {
    if (equal_side(t).count(x)) return {Verdict::kEqual, t + 1};
    if (certify(x, t)) return {Verdict::kNotEqual, t + 1};
  }
  return {Verdict::kUndecided, cap_};
}

Decision decide_word_simple(const GroupPresentation& p, const ReducedWord& w, std::uint64_t cap) {
  GroupWordDecider d(p, cap);
  return d.decide(w);
}

GroupPresentation parse_group_file(std::istream& in) {
  text::LineReader reader(in);
  auto header = reader.next_header();
  if (header.size() != 3 || header[0] != "universe" || header[1] != "group")
    throw ParseError("expected header 'universe group <k>'", reader.line());
  auto k = text::parse_u64(header[2], reader.line());
  if (k == 0 || k > 26) throw ParseError("generator count must be 1..26", reader.line());
  GroupPresentation p{static_cast<std::size_t>(k), {}};
  std::vector<std::string> toks;
  while (reader.next(toks)) {
    if (toks.size() != 2 || toks[0] != "relator")
      throw ParseError("expected 'relator <word>'", reader.line());
    ReducedWord w;
    try {
      w = parse_word(toks[1], p.k);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), reader.line());
    }
    if (w.empty()) throw ParseError("relator reduces to the identity", reader.line());
    p.relators.push_back(std::move(w));
  }
  return p;
}

}  // namespace qv::group
