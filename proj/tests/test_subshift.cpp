#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "qv/subshift.hpp"

using namespace qv;
using namespace qv::subshift;

namespace {

Word w(const std::string& text, std::size_t s = 2) { return Alphabet::standard(s).parse(text); }

SftPresentation sft(std::size_t s, std::vector<std::string> forbidden) {
  SftPresentation p{Alphabet::standard(s), {}};
  for (const auto& f : forbidden) p.forbidden.push_back(w(f, s));
  return p;
}

bool avoids(const Word& x, const std::vector<Word>& forbidden) {
  for (const auto& f : forbidden)
    if (contains_factor(x, f)) return false;
  return true;
}

// Depth-first extension search. A one-sided extension longer than the
// number of de Bruijn vertices revisits a vertex, so it closes a cycle.
bool extends_right(Word& x, std::size_t todo, std::size_t s, const std::vector<Word>& forb) {
  if (todo == 0) return true;
  for (std::uint8_t a = 0; a < s; ++a) {
    x.push_back(a);
    bool ok = avoids(x, forb) && extends_right(x, todo - 1, s, forb);
    x.pop_back();
    if (ok) return true;
  }
  return false;
}

bool extends_left(Word& x, std::size_t todo, std::size_t s, const std::vector<Word>& forb) {
  if (todo == 0) return true;
  for (std::uint8_t a = 0; a < s; ++a) {
    x.insert(x.begin(), a);
    bool ok = avoids(x, forb) && extends_left(x, todo - 1, s, forb);
    x.erase(x.begin());
    if (ok) return true;
  }
  return false;
}

bool admissible_by_extension(const SftPresentation& p, const Word& x) {
  std::size_t s = p.alphabet.size();
  std::size_t m = std::max<std::size_t>(1, max_forbidden_length(p));
  if (!avoids(x, p.forbidden)) return false;
  if (x.size() < m - 1) {
    for (std::uint8_t a = 0; a < s; ++a) {
      Word y = x;
      y.push_back(a);
      if (admissible_by_extension(p, y)) return true;
    }
    return false;
  }
  std::size_t k = 1;
  for (std::size_t i = 0; i + 1 < m; ++i) k *= s;
  k += m;
  Word a = x, b = x;
  return extends_right(a, k, s, p.forbidden) && extends_left(b, k, s, p.forbidden);
}

}  // namespace

TEST_CASE("subshift_rules: examples") {
  auto r = subshift_rules(2);
  auto i = rule_index(w("ab"), 0, 2);
  REQUIRE(i);
  CHECK(*i == 24);
  auto rule = r->rule_at(*i);
  REQUIRE(rule);
  CHECK(rule->premises == std::vector<AtomId>{atom_of(w("ab"), 2)});
  CHECK(rule->conclusion == atom_of(w("aab"), 2));

  auto shrink = r->rule_at(*rule_index(w("a"), 4, 2));
  REQUIRE(shrink);
  CHECK(shrink->premises == std::vector<AtomId>{atom_of(w("aa"), 2), atom_of(w("ab"), 2)});
  CHECK(shrink->conclusion == atom_of(w("a"), 2));
}

TEST_CASE("subshift_rules: every index decodes to one of the four families") {
  auto r = subshift_rules(3);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    auto rule = r->rule_at(i);
    REQUIRE(rule);
    auto x = unrank(i / 8, 3);
    auto fam = i % 8;
    auto c = word_of(rule->conclusion, 3);
    if (fam < 6) {
      REQUIRE(rule->premises.size() == 1);
      REQUIRE(word_of(rule->premises[0], 3) == x);
      REQUIRE(c.size() == x.size() + 1);
    } else {
      REQUIRE(rule->premises.size() == 3);
      REQUIRE(c == x);
    }
  }
}

TEST_CASE("codec: rank and unrank are inverse") {
  for (std::size_t s = 1; s <= 3; ++s)
    for (std::uint64_t i = 0; i < 500; ++i) REQUIRE(rank(unrank(i, s), s) == std::optional(i));
  CHECK(unrank(0, 2).empty());
  CHECK(unrank(3, 2) == w("aa"));
  CHECK(count_upto(2, 3) == 15);
  CHECK(count_upto(1, 3) == 4);
}

TEST_CASE("closure({ab}) is the set of words containing ab") {
  auto r = subshift_rules(2);
  auto res = closure(AtomSet{atom_of(w("ab"), 2)}, *r, sft_closure_budget(2, 2, 5));
  for (const auto& x : words_upto(2, 5))
    REQUIRE(res.derived.contains(atom_of(x, 2)) == contains_factor(x, w("ab")));
  CHECK(res.derived.contains(atom_of(w("aab"), 2)));
  CHECK(res.derived.contains(atom_of(w("abb"), 2)));
}

TEST_CASE("sft_language_oracle: examples") {
  CHECK(sft_language_oracle(sft(2, {}), 3) == words_upto(2, 3));
  CHECK(sft_language_oracle(sft(2, {"a", "b"}), 4).empty());
  std::vector<Word> want;
  for (auto t : {"-", "a", "b", "ab", "ba", "aba", "bab", "abab", "baba"}) want.push_back(w(t));
  CHECK(sft_language_oracle(sft(2, {"aa", "bb"}), 4) == want);
  CHECK_THROWS_AS(sft_language_oracle(sft(2, {}), 17), GuardError);
}

TEST_CASE("is_minimal_sft: examples") {
  CHECK(is_minimal_sft(sft(2, {"aa", "bb"})));
  CHECK_FALSE(is_minimal_sft(sft(2, {})));
  CHECK(is_minimal_sft(sft(2, {"a"})));
  CHECK_FALSE(is_minimal_sft(sft(2, {"a", "b"})));
  CHECK_FALSE(is_minimal_sft(sft(2, {"ab"})));
}

TEST_CASE("random SFTs: oracle, extension search and engine agree") {
  std::mt19937_64 rng(21);
  const std::size_t L = 4;
  for (int t = 0; t < 20; ++t) {
    std::size_t s = 2 + rng() % 2;
    SftPresentation p{Alphabet::standard(s), {}};
    std::size_t count = rng() % 4;
    for (std::size_t i = 0; i < count; ++i) p.forbidden.push_back(unrank(1 + rng() % (count_upto(s, 3) - 1), s));
    auto lang = sft_language_oracle(p, L);
    std::set<Word> adm(lang.begin(), lang.end());
    for (const auto& x : words_upto(s, L)) REQUIRE(adm.count(x) == admissible_by_extension(p, x));

    auto forb = sft_forbidden_oracle(p, L);
    REQUIRE(forb.size() + lang.size() == count_upto(s, L));

    // Factorial and extensible.
    for (const auto& x : lang) {
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j <= x.size(); ++j) REQUIRE(adm.count(Word(x.begin() + i, x.begin() + j)));
      if (x.size() < L) {
        bool left = false, right = false;
        for (std::uint8_t a = 0; a < s; ++a) {
          Word l = x, r = x;
          l.insert(l.begin(), a);
          r.push_back(a);
          left = left || adm.count(l);
          right = right || adm.count(r);
        }
        REQUIRE(left);
        REQUIRE(right);
      }
    }

    std::size_t m = max_forbidden_length(p);
    auto budget = sft_closure_budget(s, m, L);
    if (budget > 300000) continue;
    AtomSet r;
    for (const auto& f : p.forbidden) r.insert(atom_of(f, s));
    auto res = closure(r, *subshift_rules(s), budget);
    for (const auto& x : words_upto(s, L))
      REQUIRE(res.derived.contains(atom_of(x, s)) == (adm.count(x) == 0));
  }
}

TEST_CASE("quasiperiodicity: examples") {
  auto orbit = sft_language(sft(2, {"aa", "bb"}));
  CHECK(quasiperiodicity(orbit, 1, 32) == std::optional<std::size_t>(2));
  CHECK(quasiperiodicity(orbit, 2, 32) == std::optional<std::size_t>(3));
  auto fib = SubstitutionShift::fibonacci().language();
  CHECK(quasiperiodicity(fib, 1, 32) == std::optional<std::size_t>(3));
  auto single = sft_language(sft(2, {"a"}));
  CHECK(quasiperiodicity(single, 3, 32) == std::optional<std::size_t>(3));
  CHECK_THROWS_AS(quasiperiodicity(sft_language(sft(2, {"a", "b"})), 1, 8), Error);
}

TEST_CASE("quasiperiodicity of the full shift exceeds any cap") {
  auto full = sft_language(sft(2, {}));
  CHECK_FALSE(quasiperiodicity(full, 1, 10));
}

TEST_CASE("quasiperiodicity agrees with its definition") {
  auto fib = SubstitutionShift::fibonacci();
  for (std::size_t n = 0; n <= 4; ++n) {
    auto g = quasiperiodicity(fib.language(), n, 40);
    REQUIRE(g);
    auto small = fib.admissible(n);
    auto covers = [&](std::size_t len) {
      for (const auto& big : fib.admissible(len))
        for (const auto& x : small)
          if (!contains_factor(big, x)) return false;
      return true;
    };
    CHECK(covers(*g));
    if (*g > 0) CHECK_FALSE(covers(*g - 1));
  }
}

TEST_CASE("Fibonacci substitution: admissible factors") {
  auto fib = SubstitutionShift::fibonacci();
  auto two = fib.admissible(2);
  CHECK(std::count(two.begin(), two.end(), w("aa")) == 1);
  CHECK(std::count(two.begin(), two.end(), w("bb")) == 0);
  auto three = fib.admissible(3);
  CHECK(std::count(three.begin(), three.end(), w("aaa")) == 0);
  CHECK(fib.iterate(4) == w("abaababa"));
  for (std::size_t n = 0; n <= 8; ++n) CHECK(fib.admissible(n).size() == n + 1);

  auto forb = fib.forbidden_upto(3);
  CHECK(forb.contains(atom_of(w("bb"), 2)));
  CHECK(forb.contains(atom_of(w("aaa"), 2)));
  CHECK_FALSE(forb.contains(atom_of(w("aa"), 2)));
}

TEST_CASE("substitution: non-primitive incidence is rejected") {
  CHECK_THROWS_AS(SubstitutionShift(Alphabet("ab"), {w("a"), w("b")}), Error);
  CHECK_THROWS_AS(SubstitutionShift(Alphabet("ab"), {w("ab"), w("b")}), Error);
  CHECK_NOTHROW(SubstitutionShift(Alphabet("ab"), {w("ab"), w("ba")}));
}

TEST_CASE("recurrence_operator: examples") {
  auto f = recurrence_operator(2);
  CHECK(f->eval(atom_of(w("a"), 2), 1) == std::optional(AtomSet{atom_of(w("b"), 2)}));
  AtomSet want{atom_of(w("aa"), 2), atom_of(w("ba"), 2), atom_of(w("bb"), 2)};
  CHECK(f->eval(atom_of(w("ab"), 2), 2) == std::optional(want));
  CHECK(f->eval(atom_of(w("-"), 2), 3) == std::optional(AtomSet{}));
  CHECK_FALSE(f->eval(atom_of(w("a"), 2), 21));
}

TEST_CASE("alphabet and file parsing") {
  Alphabet a("xyz");
  CHECK(a.format(a.parse("zyx")) == "zyx");
  CHECK(a.format({}) == "-");
  CHECK_THROWS_AS(a.parse("xa"), ParseError);
  CHECK_THROWS_AS(Alphabet("aa"), Error);
  CHECK_THROWS_AS(Alphabet("a-"), Error);

  std::istringstream in("universe subshift ab\nforbid bb\nforbid aa\nforbid aa\n");
  auto p = parse_sft_file(in);
  CHECK(p.forbidden == std::vector<Word>{w("aa"), w("bb")});
  std::istringstream bad("universe subshift ab\nforbid abc\n");
  try {
    parse_sft_file(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
