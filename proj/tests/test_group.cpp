#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qv/group.hpp"

using namespace qv;
using namespace qv::group;

namespace {

ReducedWord word(const std::string& s, std::size_t k = 2) { return parse_word(s, k); }

ReducedWord random_raw(std::mt19937_64& rng, std::size_t k, std::size_t max_len) {
  std::vector<Letter> raw(rng() % (max_len + 1));
  for (auto& c : raw) c = static_cast<Letter>(rng() % (2 * k));
  return ReducedWord::reduce(raw);
}

const PermOracle& icosahedron() {
  static const PermOracle o = icosahedral_oracle();
  return o;
}

PermOracle cyclic5() {
  return PermOracle(GroupPresentation{1, {word("aaaaa", 1)}}, {Perm{1, 2, 3, 4, 0}});
}

}  // namespace

TEST_CASE("free group operations: examples") {
  auto ab = word("ab");
  CHECK(product(ab, inverse(ab)).empty());
  CHECK(inverse(ab) == word("BA"));
  CHECK(conjugate(word("a"), word("b")) == word("baB"));
  CHECK(word("aAbB").empty());
  CHECK(format_word(ReducedWord{}) == "1");
  CHECK(format_word(word("abAB")) == "abAB");
  CHECK(word("-").empty());
  CHECK_THROWS_AS(word("c"), ParseError);
}

TEST_CASE("free reduction is canonical on random triples") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    auto u = random_raw(rng, 2, 12), v = random_raw(rng, 2, 12), x = random_raw(rng, 2, 12);
    REQUIRE(ReducedWord::reduce(u.letters()) == u);
    for (std::size_t i = 1; i < u.size(); ++i) REQUIRE(u.letters()[i] != inverse_letter(u.letters()[i - 1]));
    REQUIRE(product(product(u, v), x) == product(u, product(v, x)));
    REQUIRE(product(u, inverse(u)).empty());
    REQUIRE(conjugate(u, v) == product(product(v, u), inverse(v)));
  }
}

TEST_CASE("codec: ranks follow the length-lex order of reduced words") {
  CHECK(count_of_length(2, 0) == 1);
  CHECK(count_of_length(2, 1) == 4);
  CHECK(count_of_length(2, 3) == 36);
  CHECK(count_upto(2, 2) == 17);
  auto b = ball(2, 3);
  REQUIRE(b.size() == count_upto(2, 3));
  for (std::uint64_t i = 0; i < b.size(); ++i) {
    REQUIRE(rank(b[i], 2) == std::optional(i));
    REQUIRE(unrank(i, 2) == b[i]);
  }
  CHECK(b[1] == word("a"));
  CHECK(b[2] == word("A"));
}

TEST_CASE("group_rules: closure examples") {
  auto r2 = group_rules(2);
  CHECK(closure(AtomSet{}, *r2, 1000).derived.members() == AtomSet{atom_of(ReducedWord{}, 2)});

  auto rel = word("abAB");
  auto budget = conjugation_rule_index(*rank(rel, 2), *rank(word("a"), 2)) + 1;
  auto res = closure(AtomSet{atom_of(rel, 2)}, *r2, static_cast<std::uint64_t>(budget));
  CHECK(res.derived.contains(atom_of(word("aabABA"), 2)));

  auto r1 = group_rules(1);
  auto all = closure(AtomSet{atom_of(word("a", 1), 1)}, *r1, 2000);
  for (const auto& x : ball(1, 3)) CHECK(all.derived.contains(atom_of(x, 1)));
}

TEST_CASE("group_rules: rule layout") {
  auto r = group_rules(2);
  auto unit = r->rule_at(0);
  REQUIRE(unit);
  CHECK(unit->premises.empty());
  CHECK(unit->conclusion == atom_of(ReducedWord{}, 2));
  auto inv = r->rule_at(inverse_rule_index(*rank(word("ab"), 2)));
  REQUIRE(inv);
  CHECK(inv->conclusion == atom_of(word("BA"), 2));
  auto prod = r->rule_at(product_rule_index(*rank(word("a"), 2), *rank(word("b"), 2)));
  REQUIRE(prod);
  CHECK(prod->conclusion == atom_of(word("ab"), 2));
}

TEST_CASE("perm oracle: examples") {
  CHECK(cyclic5().order() == 5);
  CHECK_THROWS_AS(PermOracle(GroupPresentation{1, {word("aaaaa", 1)}}, {Perm{1, 2, 3, 0, 4}}), Error);
  PermOracle trivial(GroupPresentation{1, {}}, {Perm{0, 1}});
  CHECK(trivial.order() == 1);
  const auto& o = icosahedron();
  CHECK(o.order() == 60);
  CHECK(o.degree() == 5);
  for (const auto& rel : icosahedral_presentation().relators) CHECK(o.word_is_identity(rel));
  CHECK_FALSE(o.word_is_identity(word("ab")));
}

TEST_CASE("decide_word_simple: examples") {
  auto p = icosahedral_presentation();
  CHECK(decide_word_simple(p, ReducedWord{}, kDefaultDecideCap).verdict == Verdict::kEqual);
  CHECK(decide_word_simple(p, word("aa"), kDefaultDecideCap).verdict == Verdict::kEqual);
  CHECK(decide_word_simple(p, word("ab"), kDefaultDecideCap).verdict == Verdict::kNotEqual);
  CHECK(decide_word_simple(p, word("ab"), 0).verdict == Verdict::kUndecided);
  CHECK(to_string(Verdict::kNotEqual) == "NotEqual");
}

TEST_CASE("decide_word_simple agrees with the oracle on the radius 4 ball") {
  GroupWordDecider d(icosahedral_presentation(), kDefaultDecideCap);
  const auto& o = icosahedron();
  for (const auto& w : ball(2, 4)) {
    auto v = d.decide(w).verdict;
    REQUIRE(v != Verdict::kUndecided);
    REQUIRE((v == Verdict::kEqual) == o.word_is_identity(w));
  }
}

TEST_CASE("normal closure is sound for 10^4 emissions") {
  auto p = icosahedral_presentation();
  AtomSet rel;
  for (const auto& r : p.relators) rel.insert(atom_of(r, 2));
  auto res = closure(rel, *group_rules(2), 2000000);
  REQUIRE(res.derived.size() >= 10000);
  const auto& o = icosahedron();
  for (std::size_t i = 0; i < 10000; ++i)
    REQUIRE(o.word_is_identity(word_of(res.derived.log()[i].atom, 2)));
}

TEST_CASE("g1: examples") {
  auto z5 = cyclic5();
  CHECK(g1_value(z5, word("a", 1), 10) == std::optional<std::uint64_t>(2));
  CHECK_FALSE(g1_value(z5, ReducedWord{}, 10));
  CHECK_FALSE(g1_value(z5, word("aaaaa", 1), 10));
  CHECK_THROWS_AS(g1_value(icosahedron(), word("a"), 1), Error);

  const auto& o = icosahedron();
  auto prof = simplicity_profile(o, 2, 64);
  REQUIRE(prof.g1_prime.size() == 3);
  std::uint64_t gen_max = 0;
  for (auto g : {"a", "A", "b", "B"}) gen_max = std::max(gen_max, *g1_value(o, word(g), 64));
  CHECK(prof.g1_prime[1] == gen_max);
  CHECK(prof.g1_prime[0] == 0);
  CHECK(prof.g1_prime[2] >= prof.g1_prime[1]);
  for (const auto& [w, g] : prof.g1) CHECK(g1_value(o, w, 64) == std::optional(g));
}

TEST_CASE("g1 bound decides the word problem on the radius 4 ball") {
  const auto& o = icosahedron();
  auto prof = simplicity_profile(o, 4, 64);
  auto t = prof.g1_prime[4];
  for (const auto& w : ball(2, 4)) REQUIRE(generators_reached(o, w, t) == !o.word_is_identity(w));
}

TEST_CASE("z_family: below-family complement certifies nonzero powers") {
  auto fam = z_family();
  CHECK(fam.size_at(0) == 1);
  CHECK(fam.sets_at(2) == std::vector<AtomId>{atom_of(word("aaa", 1), 1)});

  auto f = presentation_operator(group_rules(1));
  auto g = complement_op_below_family(f, z_family(), kZFamilyProbe);
  auto x = AtomEnumeration::from_set(AtomSet{atom_of(ReducedWord{}, 1)});
  std::vector<AtomId> cands{atom_of(word("aaa", 1), 1), atom_of(ReducedWord{}, 1),
                            atom_of(word("AA", 1), 1)};
  auto res = apply_operator_guided(*g, x, cands, kZFamilyEffort);
  CHECK(res.emitted.contains(cands[0]));
  CHECK(res.emitted.contains(cands[2]));
  CHECK_FALSE(res.emitted.contains(cands[1]));
  for (const auto& [a, n] : res.certificates) CHECK(value_within(g->eval(a, n), x.members()));
}

TEST_CASE("presentation file parsing") {
  std::istringstream in("universe group 2\nrelator abAB\nrelator aa\n");
  auto p = parse_group_file(in);
  CHECK(p.k == 2);
  CHECK(p.relators == std::vector<ReducedWord>{word("abAB"), word("aa")});
  std::istringstream bad("universe group 2\nrelator ac\n");
  try {
    parse_group_file(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
