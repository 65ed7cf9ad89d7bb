#include <random>
#include <sstream>

#include "doctest.h"
#include "qv/finite.hpp"

using namespace qv;
using namespace qv::finite;

namespace {

HornRule rule(std::vector<std::uint64_t> prem, std::uint64_t concl) {
  std::vector<AtomId> p;
  for (auto i : prem) p.emplace_back(i);
  return HornRule(std::move(p), AtomId(concl));
}

std::vector<Subset> points_by_definition(const FiniteQuasivariety& q) {
  std::vector<Subset> out;
  for (Subset x = 0; x <= full_set(q.n); ++x) {
    bool ok = true;
    for (const auto& r : q.rules) {
      bool prem = true;
      for (const auto& p : r.premises) prem = prem && (x >> small_index(p) & 1);
      if (prem && !(x >> small_index(r.conclusion) & 1)) ok = false;
    }
    if (ok) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("all_points: examples") {
  CHECK(all_points(FiniteQuasivariety(2, {})) == std::vector<Subset>{0, 1, 2, 3});
  CHECK(all_points(FiniteQuasivariety(2, {rule({0}, 1), rule({1}, 0)})) ==
        std::vector<Subset>{0, 3});
  CHECK(all_points(FiniteQuasivariety(3, {rule({}, 0)})) == std::vector<Subset>{1, 3, 5, 7});
}

TEST_CASE("all_points: guard") {
  CHECK_THROWS_AS(all_points(FiniteQuasivariety(21, {})), GuardError);
  CHECK_THROWS_AS(FiniteQuasivariety(33, {}), GuardError);
  CHECK_THROWS_AS(FiniteQuasivariety(2, {rule({0}, 2)}), Error);
}

TEST_CASE("brute_closure: examples") {
  FiniteQuasivariety empty(3, {});
  for (Subset r = 0; r < 8; ++r) CHECK(brute_closure(empty, r) == r);
  CHECK(brute_closure(FiniteQuasivariety(3, {rule({0}, 1)}), 0b001) == 0b011);
}

TEST_CASE("meet and join: examples") {
  FiniteQuasivariety q(2, {});
  CHECK(join(q, 0b01, 0b10) == 0b11);
  CHECK(meet(q, 0b01, 0b10) == 0);
  FiniteQuasivariety p(2, {rule({0}, 1), rule({1}, 0)});
  CHECK(meet(p, 3, 3) == 3);
  CHECK(join(p, 0, 0) == 0);
  CHECK_THROWS_AS(meet(p, 1, 3), Error);
}

TEST_CASE("maximal_points: examples") {
  CHECK(maximal_points(FiniteQuasivariety(2, {rule({0}, 1), rule({1}, 0)})) ==
        std::vector<Subset>{0});
  CHECK(maximal_points(FiniteQuasivariety(3, {})) == std::vector<Subset>{3, 5, 6});
  CHECK(maximal_points(FiniteQuasivariety(2, {rule({}, 0)})) == std::vector<Subset>{1});
}

TEST_CASE("is_discriminator: examples") {
  FiniteQuasivariety q(3, {});
  CHECK(is_discriminator(q, 0b011, 0b100));
  CHECK(is_discriminator(q, 0b001, 0b110));
  CHECK_FALSE(is_discriminator(q, 0b001, 0));
  CHECK_FALSE(is_discriminator(q, 0b001, 0b010));
}

TEST_CASE("lattice laws on random instances") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    auto q = random_quasivariety(rng, 1 + rng() % 5, rng() % 10);
    auto pts = all_points(q);
    REQUIRE(pts == points_by_definition(q));
    REQUIRE(pts.back() == full_set(q.n));
    for (auto x : pts) {
      for (auto y : pts) {
        auto m = meet(q, x, y), j = join(q, x, y);
        REQUIRE(m == (x & y));
        REQUIRE(q.satisfies(m));
        REQUIRE(q.satisfies(j));
        REQUIRE((j & (x | y)) == (x | y));
        REQUIRE(meet(q, x, j) == x);
        REQUIRE(join(q, x, m) == x);
        REQUIRE(join(q, x, y) == join(q, y, x));
        for (auto z : pts)
          if ((z & (x | y)) == (x | y)) REQUIRE((j & z) == j);
      }
      for (Subset r = 0; r <= full_set(q.n); ++r)
        if ((r & x) == r) REQUIRE((brute_closure(q, r) & x) == brute_closure(q, r));
    }
  }
}

TEST_CASE("maximal points and discriminators agree with their definitions") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    auto q = random_quasivariety(rng, 1 + rng() % 5, rng() % 10);
    auto pts = all_points(q);
    Subset top = full_set(q.n);
    std::vector<Subset> want;
    for (auto x : pts) {
      if (x == top) continue;
      bool only_top = true;
      for (auto y : pts)
        if (y != x && y != top && (y & x) == x) only_top = false;
      if (only_top) want.push_back(x);
    }
    REQUIRE(maximal_points(q) == want);
    for (auto x : pts) REQUIRE(is_discriminator(q, x, top & ~x));
    for (auto x : want)
      for (std::size_t a = 0; a < q.n; ++a)
        if (!(x >> a & 1)) REQUIRE(is_discriminator(q, x, Subset{1} << a));
  }
}

TEST_CASE("check_intersection_closed: examples") {
  CHECK(check_intersection_closed(PartialMapFamily(2, {})));
  CHECK_FALSE(check_intersection_closed(PartialMapFamily(2, {{0, 0b11}})));
  CHECK(check_intersection_closed(PartialMapFamily(2, {{0b01, 0b10}})));
}

TEST_CASE("pi01_to_rules: examples") {
  auto q = pi01_to_rules(PartialMapFamily(2, {{0b01, 0b10}}));
  CHECK(q.rules == std::vector<HornRule>{rule({0}, 1)});

  PartialMapFamily fam(3, {{0b001, 0b010}, {0b001, 0b100}, {0b001, 0b110}});
  auto r = pi01_to_rules(fam);
  for (Subset x = 0; x < 8; ++x) CHECK(r.satisfies(x) == fam.in_class(x));

  CHECK_THROWS_AS(pi01_to_rules(PartialMapFamily(2, {{0, 0b11}})), Error);
  auto d = diagnose_class(PartialMapFamily(2, {{0b11, 0}}));
  CHECK_FALSE(d.ok);
  CHECK_FALSE(d.reason.empty());
}

TEST_CASE("pi01_to_rules matches the class on random intersection-closed families") {
  std::mt19937_64 rng(9);
  int converted = 0;
  for (int t = 0; t < 2000 && converted < 100; ++t) {
    std::size_t n = 2 + rng() % 3;
    std::vector<PartialMap> maps;
    std::size_t count = rng() % 4;
    for (std::size_t i = 0; i < count; ++i) {
      PartialMap m;
      for (std::size_t a = 0; a < n; ++a) {
        auto v = rng() % 3;
        if (v == 1) m.ones |= Subset{1} << a;
        if (v == 2) m.zeros |= Subset{1} << a;
      }
      if ((m.ones | m.zeros) != 0) maps.push_back(m);
    }
    PartialMapFamily fam(n, maps);
    if (!diagnose_class(fam).ok) {
      CHECK_THROWS_AS(pi01_to_rules(fam), Error);
      continue;
    }
    ++converted;
    auto q = pi01_to_rules(fam);
    for (Subset x = 0; x <= full_set(n); ++x) REQUIRE(q.satisfies(x) == fam.in_class(x));
  }
  CHECK(converted == 100);
}

TEST_CASE("brute_reduction: examples") {
  auto bottom = brute_reduction(0, 0b11, 2);
  for (std::uint64_t x = 0; x < 2; ++x) CHECK_FALSE(bottom->eval(AtomId(x), 0));
  auto all = brute_reduction(0b11, 0b10, 2);
  CHECK(all->eval(AtomId(0), 0) == std::optional(make_atom_set({1})));
  CHECK(all->eval(AtomId(1), 0) == std::optional(make_atom_set({1})));
  CHECK_FALSE(all->eval(AtomId(1), 1));
  CHECK_THROWS_AS(brute_reduction(0b100, 0, 2), Error);
}

TEST_CASE("rule file: parse and format round trip") {
  std::istringstream in("# two atoms\nuniverse finite 3\n\n0 -> 1\n1 2 -> 0  # comment\n-> 2\n");
  auto q = parse_rule_file(in);
  CHECK(q.n == 3);
  CHECK(q.rules.size() == 3);
  std::istringstream again(format_rule_file(q));
  CHECK(parse_rule_file(again).rules == q.rules);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    auto r = random_quasivariety(rng, 1 + rng() % 8, rng() % 10);
    std::istringstream s(format_rule_file(r));
    auto p = parse_rule_file(s);
    REQUIRE(p.n == r.n);
    REQUIRE(p.rules == r.rules);
  }
}

TEST_CASE("rule file: errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_rule_file(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("universe finite 2\n0 -> 1\n0 1\n") == 3);
  CHECK(line_of("universe finite 2\n\n0 -> 5\n") == 3);
  CHECK(line_of("\nuniverse group 2\n") == 2);
  CHECK(line_of("universe finite 2\n0 -> x\n") == 2);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_rule_file(empty), ParseError);
}

TEST_CASE("partial map file: parse and format round trip") {
  std::istringstream in("universe finite 3\n+0 -1\n+0 -1 -2\n");
  auto fam = parse_partial_map_file(in);
  REQUIRE(fam.maps.size() == 2);
  CHECK(fam.maps[0] == PartialMap{0b001, 0b010});
  CHECK(fam.maps[1] == PartialMap{0b001, 0b110});
  std::istringstream again(format_partial_map_file(fam));
  CHECK(parse_partial_map_file(again).maps == fam.maps);

  std::istringstream twice("universe finite 3\n+0 -0\n");
  CHECK_THROWS_AS(parse_partial_map_file(twice), ParseError);
  std::istringstream bad("universe finite 3\n0\n");
  CHECK_THROWS_AS(parse_partial_map_file(bad), ParseError);
}

TEST_CASE("masks round trip through atom sets") {
  for (Subset m = 0; m < 1024; ++m) REQUIRE(to_mask(from_mask(m)) == m);
  CHECK(format_subset(0) == "{}");
  CHECK(format_subset(0b101) == "{0,2}");
  CHECK_THROWS_AS(to_mask(make_atom_set({40})), RangeError);
}
