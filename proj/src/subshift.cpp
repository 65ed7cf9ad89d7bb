#include "qv/subshift.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <set>

#include "qv/text.hpp"

namespace qv::subshift {

namespace {

constexpr std::size_t kMaxWordLength = 1u << 16;

using u128 = unsigned __int128;

std::optional<std::uint64_t> checked(u128 v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

// Start rank of the words of length l.
std::optional<std::uint64_t> length_offset(std::size_t s, std::size_t l) {
  if (s == 1) return l;
  u128 total = 0;
  u128 power = 1;
  for (std::size_t i = 0; i < l; ++i) {
    total += power;
    power *= s;
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return checked(total);
}

}  // namespace

Alphabet::Alphabet(std::string letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error("alphabet must have at least one letter");
  if (letters_.size() > 255) throw Error("alphabet too large");
  std::set<char> seen;
  for (char c : letters_) {
    if (c == '-' || c <= ' ' || c == '#') throw Error(std::string("invalid letter '") + c + "'");
    if (!seen.insert(c).second) throw Error(std::string("duplicate letter '") + c + "'");
  }
}

Alphabet Alphabet::standard(std::size_t size) {
  if (size == 0 || size > 26) throw Error("standard alphabet size must be 1..26");
  std::string s;
  for (std::size_t i = 0; i < size; ++i) s.push_back(static_cast<char>('a' + i));
  return Alphabet(s);
}

Word Alphabet::parse(const std::string& text) const {
  if (text == "-") return {};
  Word w;
  for (char c : text) {
    auto pos = letters_.find(c);
    if (pos == std::string::npos) throw ParseError(std::string("unknown letter '") + c + "'");
    w.push_back(static_cast<std::uint8_t>(pos));
  }
  if (w.empty()) throw ParseError("empty word; write '-' for the empty word");
  return w;
}

std::string Alphabet::format(const Word& w) const {
  if (w.empty()) return "-";
  std::string s;
  for (auto c : w) s.push_back(letters_.at(c));
  return s;
}

std::uint64_t count_upto(std::size_t s, std::size_t len) {
  auto v = length_offset(s, len + 1);
  if (!v) throw RangeError("word count exceeds 64 bits");
  return *v;
}

std::optional<std::uint64_t> rank(const Word& w, std::size_t s) {
  auto offset = length_offset(s, w.size());
  if (!offset) return std::nullopt;
  if (s == 1) return offset;
  u128 value = 0;
  for (auto c : w) {
    value = value * s + c;
    if (value > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return checked(value + *offset);
}

Word unrank(std::uint64_t i, std::size_t s) {
  if (s == 1) {
    if (i > kMaxWordLength) throw RangeError("word too long");
    return Word(i, 0);
  }
  std::size_t l = 0;
  u128 start = 0, power = 1;
  while (start + power <= i) {
    start += power;
    power *= s;
    ++l;
  }
  u128 value = i - start;
  Word w(l);
  for (std::size_t k = l; k-- > 0;) {
    w[k] = static_cast<std::uint8_t>(value % s);
    value /= s;
  }
  return w;
}

AtomId atom_of(const Word& w, std::size_t s) {
  auto r = rank(w, s);
  if (!r) throw RangeError("word rank exceeds 64 bits");
  return AtomId{*r};
}

Word word_of(AtomId a, std::size_t s) { return unrank(small_index(a), s); }

bool contains_factor(const Word& w, const Word& factor) {
  return std::search(w.begin(), w.end(), factor.begin(), factor.end()) != w.end();
}

std::vector<Word> words_of_length(std::size_t s, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<Word> next;
    next.reserve(out.size() * s);
    for (const auto& w : out)
      for (std::size_t c = 0; c < s; ++c) {
        Word v = w;
        v.push_back(static_cast<std::uint8_t>(c));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<Word> words_upto(std::size_t s, std::size_t n) {
  std::vector<Word> out;
  for (std::size_t l = 0; l <= n; ++l) {
    auto layer = words_of_length(s, l);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<RuleIndex> rule_index(const Word& w, std::size_t r, std::size_t s) {
  auto rw = rank(w, s);
  if (!rw) return std::nullopt;
  return Natural(*rw) * (2 * s + 2) + r;
}

namespace {

class SubshiftRules final : public RuleStream {
 public:
  explicit SubshiftRules(std::size_t s) : s_(s) {}

  std::optional<HornRule> rule_at(RuleIndex i) const override {
    const std::size_t period = 2 * s_ + 2;
    Word w;
    try {
      w = unrank(small_index(i / period), s_);
    } catch (const RangeError&) {
      return std::nullopt;
    }
    return build(w, static_cast<std::size_t>(i % period));
  }

  bool indexes_triggers() const override { return true; }

  void for_each_triggered(AtomId fresh, const KnownAtoms& known, RuleIndex limit,
                          const RuleSink& sink) const override {
    visit(fresh, known, [&](const Word&, std::optional<RuleIndex> idx) {
      return idx && *idx < limit;
    }, sink);
  }

  void for_each_axiom(RuleIndex, const RuleSink&) const override {}

  void for_each_local(AtomId fresh, const KnownAtoms& known, std::uint64_t radius,
                      const RuleSink& sink) const override {
    // every rule for w involves words of length |w| and |w| + 1
    visit(fresh, known, [&](const Word& w, std::optional<RuleIndex> idx) {
      return idx.has_value() && w.size() + 1 <= radius;
    }, sink);
  }

  void for_each_local_axiom(std::uint64_t, const RuleSink&) const override {}

 private:
  std::optional<HornRule> build(const Word& w, std::size_t r) const {
    try {
      if (r < 2 * s_) {
        Word v = w;
        auto c = static_cast<std::uint8_t>(r % s_);
        if (r < s_)
          v.insert(v.begin(), c);
        else
          v.push_back(c);
        auto concl = rank(v, s_);
        auto prem = rank(w, s_);
        if (!concl || !prem) return std::nullopt;
        return HornRule({AtomId{*prem}}, AtomId{*concl});
      }
      std::vector<AtomId> prem;
      for (std::size_t c = 0; c < s_; ++c) {
        Word v = w;
        if (r == 2 * s_)
          v.push_back(static_cast<std::uint8_t>(c));
        else
          v.insert(v.begin(), static_cast<std::uint8_t>(c));
        auto rv = rank(v, s_);
        if (!rv) return std::nullopt;
        prem.push_back(AtomId{*rv});
      }
      auto concl = rank(w, s_);
      if (!concl) return std::nullopt;
      return HornRule(std::move(prem), AtomId{*concl});
    } catch (const RangeError&) {
      return std::nullopt;
    }
  }

  template <class Accept>
  void visit(AtomId fresh, const KnownAtoms& known, Accept accept, const RuleSink& sink) const {
    Word v;
    try {
      v = word_of(fresh, s_);
    } catch (const RangeError&) {
      return;
    }
    auto offer = [&](const Word& w, std::size_t r) {
      auto rule = build(w, r);
      if (!rule) return;
      for (auto p : rule->premises)
        if (!known.contains(p)) return;
      auto idx = rule_index(w, r, s_);
      if (accept(w, idx)) sink(*idx, *rule);
    };
    for (std::size_t r = 0; r < 2 * s_; ++r) offer(v, r);
    if (!v.empty()) {
      offer(Word(v.begin(), v.end() - 1), 2 * s_);
      offer(Word(v.begin() + 1, v.end()), 2 * s_ + 1);
    }
  }

  std::size_t s_;
};

}  // namespace

RuleStreamPtr subshift_rules(std::size_t s) {
  if (s == 0) throw Error("alphabet must have at least one letter");
  return std::make_shared<SubshiftRules>(s);
}

// ---------------------------------------------------------------------------

std::size_t max_forbidden_length(const SftPresentation& p) {
  std::size_t m = 1;
  for (const auto& f : p.forbidden) m = std::max(m, f.size());
  return m;
}

namespace {

// The de Bruijn graph on (m-1)-words, restricted to edges free of forbidden
// factors and trimmed to vertices with both in- and out-edges.
struct DeBruijn {
  std::size_t s = 0;
  std::size_t m = 1;
  std::uint64_t vertices = 1;       // s^(m-1)
  std::vector<bool> alive;          // by lexicographic value
  std::vector<bool> edge_ok;        // by value of the m-word
  bool empty = true;

  explicit DeBruijn(const SftPresentation& p) : s(p.alphabet.size()), m(max_forbidden_length(p)) {
    for (const auto& f : p.forbidden)
      if (f.empty()) return;  // forbidding the empty word empties the subshift
    for (std::size_t i = 0; i + 1 < m; ++i) {
      vertices *= s;
      if (vertices > (1u << 22)) throw GuardError("de Bruijn graph too large");
    }
    const std::uint64_t edges = vertices * s;
    edge_ok.assign(edges, false);
    for (std::uint64_t e = 0; e < edges; ++e) {
      Word w = word_from_value(e, m);
      edge_ok[e] = std::none_of(p.forbidden.begin(), p.forbidden.end(),
                                [&](const Word& f) { return contains_factor(w, f); });
    }
    alive.assign(vertices, true);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint64_t v = 0; v < vertices; ++v) {
        if (!alive[v]) continue;
        if (out_degree(v) == 0 || in_degree(v) == 0) {
          alive[v] = false;
          changed = true;
        }
      }
    }
    empty = std::none_of(alive.begin(), alive.end(), [](bool b) { return b; });
  }

  Word word_from_value(std::uint64_t value, std::size_t len) const {
    Word w(len);
    for (std::size_t k = len; k-- > 0;) {
      w[k] = static_cast<std::uint8_t>(value % s);
      value /= s;
    }
    return w;
  }

  std::uint64_t value_of(const Word& w, std::size_t begin, std::size_t len) const {
    std::uint64_t v = 0;
    for (std::size_t i = begin; i < begin + len; ++i) v = v * s + w[i];
    return v;
  }

  std::uint64_t target(std::uint64_t e) const { return e % vertices; }
  std::uint64_t source(std::uint64_t e) const { return e / s; }

  bool live_edge(std::uint64_t e) const {
    return edge_ok[e] && alive[source(e)] && alive[target(e)];
  }

  std::size_t out_degree(std::uint64_t v) const {
    std::size_t d = 0;
    for (std::size_t c = 0; c < s; ++c) d += live_edge(v * s + c);
    return d;
  }

  std::size_t in_degree(std::uint64_t v) const {
    // the m-word c v for each letter c
    std::size_t d = 0;
    for (std::size_t c = 0; c < s; ++c) d += live_edge(static_cast<std::uint64_t>(c) * vertices + v);
    return d;
  }
};

}  // namespace

std::vector<Word> sft_language_oracle(const SftPresentation& p, std::size_t L) {
  if (L > kMaxOracleLength)
    throw GuardError("oracle length is limited to " + std::to_string(kMaxOracleLength));
  DeBruijn g(p);
  if (g.empty) return {};
  const std::size_t s = g.s, k = g.m - 1;

  // Factors of live vertex words, for lengths below m - 1.
  std::set<Word> short_factors;
  if (k > 0)
    for (std::uint64_t v = 0; v < g.vertices; ++v) {
      if (!g.alive[v]) continue;
      Word w = g.word_from_value(v, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) short_factors.insert(Word(w.begin() + i, w.begin() + j + 1));
    }

  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= L; ++len) {
    std::vector<Word> next;
    for (const auto& u : layer)
      for (std::size_t c = 0; c < s; ++c) {
        Word w = u;
        w.push_back(static_cast<std::uint8_t>(c));
        bool ok;
        if (len < k) {
          ok = short_factors.count(w) > 0;
        } else if (len == k) {
          ok = g.alive[g.value_of(w, 0, k)];
        } else {
          ok = g.live_edge(g.value_of(w, len - g.m, g.m));
        }
        if (ok) next.push_back(std::move(w));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::vector<Word> sft_forbidden_oracle(const SftPresentation& p, std::size_t L) {
  auto admissible = sft_language_oracle(p, L);
  std::set<Word> adm(admissible.begin(), admissible.end());
  std::vector<Word> out;
  for (auto& w : words_upto(p.alphabet.size(), L))
    if (!adm.count(w)) out.push_back(std::move(w));
  return out;
}

bool is_minimal_sft(const SftPresentation& p) {
  DeBruijn g(p);
  if (g.empty) return false;
  std::uint64_t count = 0, start = 0;
  for (std::uint64_t v = 0; v < g.vertices; ++v) {
    if (!g.alive[v]) continue;
    if (g.out_degree(v) != 1 || g.in_degree(v) != 1) return false;
    if (count++ == 0) start = v;
  }
  std::uint64_t v = start, steps = 0;
  do {
    for (std::size_t c = 0; c < g.s; ++c)
      if (g.live_edge(v * g.s + c)) {
        v = g.target(v * g.s + c);
        break;
      }
    ++steps;
  } while (v != start && steps <= count);
  return steps == count;
}

std::uint64_t sft_derivation_length(std::size_t s, std::size_t m, std::size_t L) {
  if (m == 0) m = 1;
  std::uint64_t power = 1;
  for (std::size_t i = 0; i + 1 < m; ++i) power *= s;
  return L + (m - 1) + power;
}

std::uint64_t sft_closure_budget(std::size_t s, std::size_t m, std::size_t L) {
  auto len = sft_derivation_length(s, m, L);
  u128 v = static_cast<u128>(2 * s + 2) * count_upto(s, len - 1);
  auto c = checked(v);
  if (!c) throw RangeError("closure budget exceeds 64 bits");
  return *c;
}

Language sft_language(const SftPresentation& p) {
  return [p](std::size_t n) {
    std::vector<Word> out;
    for (auto& w : sft_language_oracle(p, n))
      if (w.size() == n) out.push_back(std::move(w));
    return out;
  };
}

std::optional<std::size_t> quasiperiodicity(const Language& lang, std::size_t n, std::size_t cap) {
  auto targets = lang(n);
  if (targets.empty()) throw Error("quasiperiodicity of an empty language");
  for (std::size_t N = n; N <= cap; ++N) {
    auto words = lang(N);
    bool ok = std::all_of(words.begin(), words.end(), [&](const Word& w) {
      return std::all_of(targets.begin(), targets.end(),
                         [&](const Word& t) { return contains_factor(w, t); });
    });
    if (ok) return N;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

void add_factors(const Word& w, std::size_t n, std::set<Word>& out) {
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.insert(Word(w.begin() + i, w.begin() + i + n));
}

bool is_primitive(const std::vector<Word>& images, std::size_t s) {
  // Wielandt: a primitive s x s matrix has M^k > 0 for k = (s-1)^2 + 1.
  using Matrix = std::vector<std::vector<bool>>;
  Matrix m(s, std::vector<bool>(s, false));
  for (std::size_t i = 0; i < s; ++i)
    for (auto c : images[i]) m[i][c] = true;
  Matrix power = m;
  const std::size_t bound = (s - 1) * (s - 1) + 1;
  for (std::size_t k = 1;; ++k) {
    bool positive = true;
    for (const auto& row : power)
      for (bool b : row) positive = positive && b;
    if (positive) return true;
    if (k >= bound) return false;
    Matrix next(s, std::vector<bool>(s, false));
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        for (std::size_t l = 0; l < s && !next[i][j]; ++l) next[i][j] = power[i][l] && m[l][j];
    power = std::move(next);
  }
}

}  // namespace

SubstitutionShift::SubstitutionShift(Alphabet alphabet, std::vector<Word> images)
    : alphabet_(std::move(alphabet)), images_(std::move(images)) {
  const std::size_t s = alphabet_.size();
  if (images_.size() != s) throw Error("substitution needs one image per letter");
  bool grows = false;
  for (const auto& img : images_) {
    if (img.empty()) throw Error("substitution image is empty");
    for (auto c : img)
      if (c >= s) throw Error("substitution image letter out of range");
    grows = grows || img.size() >= 2;
  }
  if (!grows || !is_primitive(images_, s)) throw Error("substitution is not primitive");

  // Admissible 2-words: close the 2-factors of the images under
  // xy -> 2-factors of image(x) image(y).
  std::set<Word> two;
  for (const auto& img : images_) add_factors(img, 2, two);
  for (std::vector<Word> todo(two.begin(), two.end()); !todo.empty();) {
    Word xy = todo.back();
    todo.pop_back();
    std::set<Word> found;
    add_factors(apply(xy), 2, found);
    for (const auto& f : found)
      if (two.insert(f).second) todo.push_back(f);
  }
  two_words_.assign(two.begin(), two.end());
}

SubstitutionShift SubstitutionShift::fibonacci() {
  return SubstitutionShift(Alphabet("ab"), {Word{0, 1}, Word{0}});
}

Word SubstitutionShift::apply(const Word& w) const {
  Word out;
  for (auto c : w) out.insert(out.end(), images_[c].begin(), images_[c].end());
  return out;
}

Word SubstitutionShift::iterate(std::size_t k, std::uint8_t letter) const {
  Word w{letter};
  for (std::size_t i = 0; i < k; ++i) w = apply(w);
  return w;
}

std::vector<Word> SubstitutionShift::admissible(std::size_t n) const {
  if (n == 0) return {Word{}};
  // Once every image under sigma^k has length >= n, each admissible n-word
  // lies inside sigma^k of a letter or of an admissible 2-word.
  std::vector<Word> imgs;
  for (std::size_t c = 0; c < alphabet_.size(); ++c) imgs.push_back(Word{static_cast<std::uint8_t>(c)});
  auto shortest = [&] {
    std::size_t m = imgs.front().size();
    for (const auto& w : imgs) m = std::min(m, w.size());
    return m;
  };
  while (shortest() < n)
    for (auto& w : imgs) w = apply(w);
  std::set<Word> out;
  for (const auto& w : imgs) add_factors(w, n, out);
  for (const auto& xy : two_words_) {
    Word joined = imgs[xy[0]];
    joined.insert(joined.end(), imgs[xy[1]].begin(), imgs[xy[1]].end());
    add_factors(joined, n, out);
  }
  return {out.begin(), out.end()};
}

Language SubstitutionShift::language() const {
  return [self = *this](std::size_t n) { return self.admissible(n); };
}

AtomEnumeration SubstitutionShift::forbidden_upto(std::size_t L) const {
  AtomEnumeration out;
  const std::size_t s = alphabet_.size();
  std::uint64_t step = 0;
  for (std::size_t n = 0; n <= L; ++n) {
    auto adm = admissible(n);
    std::set<Word> a(adm.begin(), adm.end());
    for (const auto& w : words_of_length(s, n))
      if (!a.count(w)) out.emit(atom_of(w, s), step++);
  }
  return out;
}

// ---------------------------------------------------------------------------

OperatorPtr recurrence_operator(std::size_t s) {
  return std::make_shared<LambdaOperator>([s](AtomId x, const Natural& n_big) -> OperatorValue {
    if (n_big > 20) return std::nullopt;
    auto n = static_cast<std::size_t>(n_big);
    Word xw;
    try {
      xw = word_of(x, s);
    } catch (const RangeError&) {
      return std::nullopt;
    }
    AtomSet out;
    for (const auto& w : words_of_length(s, n))
      if (!contains_factor(w, xw)) out.insert(atom_of(w, s));
    return out;
  });
}

SftPresentation parse_sft_file(std::istream& in) {
  text::LineReader reader(in);
  auto header = reader.next_header();
  if (header.size() != 3 || header[0] != "universe" || header[1] != "subshift")
    throw ParseError("expected header 'universe subshift <letters>'", reader.line());
  std::optional<Alphabet> alphabet;
  try {
    alphabet.emplace(header[2]);
  } catch (const Error& e) {
    throw ParseError(e.what(), reader.line());
  }
  SftPresentation p{*alphabet, {}};
  std::vector<std::string> toks;
  while (reader.next(toks)) {
    if (toks.size() != 2 || toks[0] != "forbid")
      throw ParseError("expected 'forbid <word>'", reader.line());
    try {
      p.forbidden.push_back(p.alphabet.parse(toks[1]));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), reader.line());
    }
  }
  std::sort(p.forbidden.begin(), p.forbidden.end());
  p.forbidden.erase(std::unique(p.forbidden.begin(), p.forbidden.end()), p.forbidden.end());
  return p;
}

}  // namespace qv::subshift
