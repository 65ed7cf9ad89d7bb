#include <random>

#include "doctest.h"
#include "qv/codec.hpp"
#include "qv/engine.hpp"
#include "qv/finite.hpp"
#include "qv/group.hpp"
#include "qv/operators.hpp"
#include "qv/subshift.hpp"

using namespace qv;

namespace {

RuleStreamPtr finite_rules(std::vector<HornRule> rules) {
  return std::make_shared<FiniteRuleStream>(std::move(rules));
}

HornRule rule(std::vector<std::uint64_t> prem, std::uint64_t concl) {
  std::vector<AtomId> p;
  for (auto i : prem) p.emplace_back(i);
  return HornRule(std::move(p), AtomId(concl));
}

AtomSet atoms(std::initializer_list<std::uint64_t> xs) { return make_atom_set(xs); }

}  // namespace

TEST_CASE("closure: single rule reaches a certified fixpoint") {
  auto s = finite_rules({rule({0}, 1)});
  auto res = closure(atoms({0}), *s, 1);
  CHECK(res.derived.members() == atoms({0, 1}));
  CHECK(res.fixpoint_certified);
}

TEST_CASE("closure: budget 0 returns the presentation") {
  auto s = finite_rules({rule({0}, 1), rule({}, 2)});
  auto res = closure(atoms({0}), *s, 0);
  CHECK(res.derived.members() == atoms({0}));
  CHECK_FALSE(res.fixpoint_certified);
}

TEST_CASE("closure: fixpoint is never certified for infinite streams") {
  auto res = closure(AtomSet{}, *group::group_rules(1), 100);
  CHECK_FALSE(res.fixpoint_certified);
}

TEST_CASE("closure: emit log has no duplicates and matches membership") {
  auto s = group::group_rules(2);
  AtomSet r{group::atom_of(group::parse_word("abAB", 2), 2)};
  auto res = closure(r, *s, 5000);
  AtomSet seen;
  for (const auto& e : res.derived.log()) REQUIRE(seen.insert(e.atom).second);
  CHECK(seen == res.derived.members());
}

TEST_CASE("closure: identical runs give identical logs") {
  auto s = subshift::subshift_rules(2);
  AtomSet r{subshift::atom_of({0, 1}, 2)};
  auto a = closure(r, *s, 3000);
  auto b = closure(r, *s, 3000);
  CHECK(a.derived.log() == b.derived.log());
  CHECK(a.steps_used == b.steps_used);
}

TEST_CASE("closure: monotone in the budget") {
  auto g = group::group_rules(2);
  AtomSet gr{group::atom_of(group::parse_word("abAB", 2), 2)};
  auto sh = subshift::subshift_rules(2);
  AtomSet sr{subshift::atom_of({0, 0}, 2)};
  AtomSet prev_g, prev_s;
  for (std::uint64_t b = 0; b <= 2000; b += 97) {
    auto cg = closure(gr, *g, b).derived.members();
    auto cs = closure(sr, *sh, b).derived.members();
    CHECK(is_subset(prev_g, cg));
    CHECK(is_subset(prev_s, cs));
    prev_g = cg;
    prev_s = cs;
  }
}

TEST_CASE("closure laws on random finite instances") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    auto q = finite::random_quasivariety(rng, 1 + rng() % 6, rng() % 13);
    auto s = q.stream();
    finite::Subset full = finite::full_set(q.n);
    for (finite::Subset r = 0; r <= full; ++r) {
      auto c = closure(finite::from_mask(r), *s, q.rules.size());
      REQUIRE(c.fixpoint_certified);
      auto cm = finite::to_mask(c.derived.members());
      REQUIRE(cm == finite::brute_closure(q, r));
      REQUIRE((r & ~cm) == 0);
      auto again = closure(c.derived.members(), *s, q.rules.size()).derived.members();
      REQUIRE(finite::to_mask(again) == cm);
    }
  }
}

TEST_CASE("derivation_decode: empty sequence is the reflexive axiom") {
  auto s = finite_rules({rule({0}, 1)});
  CHECK(derivation_decode(*s, AtomId(5), 0) == std::optional(atoms({5})));
}

TEST_CASE("derivation_decode: one-step derivation returns its premises") {
  auto s = finite_rules({rule({0}, 1)});
  CHECK(derivation_decode(*s, AtomId(1), codec::seq_encode({0})) == std::optional(atoms({0})));
  CHECK_FALSE(derivation_decode(*s, AtomId(0), codec::seq_encode({0})));
  CHECK_FALSE(derivation_decode(*s, AtomId(1), codec::seq_encode({3})));
}

TEST_CASE("derivation_decode: leaves exclude earlier conclusions") {
  auto s = finite_rules({rule({0}, 1), rule({1, 2}, 3)});
  CHECK(derivation_decode(*s, AtomId(3), codec::seq_encode({0, 1})) ==
        std::optional(atoms({0, 2})));
}

TEST_CASE("derivation_decode: aab derives from ab within three rules") {
  using subshift::atom_of;
  auto s = subshift::subshift_rules(2);
  AtomId goal = atom_of({0, 0, 1}, 2);
  AtomSet want{atom_of({0, 1}, 2)};
  const std::uint64_t bound = 30;
  bool found = false;
  for (std::uint64_t i = 0; i < bound && !found; ++i) {
    if (derivation_decode(*s, goal, codec::seq_encode64({i})) == want) found = true;
    for (std::uint64_t j = 0; j < bound && !found; ++j) {
      if (derivation_decode(*s, goal, codec::seq_encode64({i, j})) == want) found = true;
      for (std::uint64_t k = 0; k < bound && !found; ++k)
        if (derivation_decode(*s, goal, codec::seq_encode64({i, j, k})) == want) found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("presentation operator: no rules reduces every set to itself") {
  auto f = presentation_operator(finite_rules({}));
  for (std::uint64_t n = 0; n < 200; ++n) {
    auto v = f->eval(AtomId(3), n);
    if (n == 0)
      CHECK(v == std::optional(atoms({3})));
    else
      CHECK_FALSE(v);
  }
}

TEST_CASE("presentation operator: induced set of {0} under [{0} => 1]") {
  auto f = presentation_operator(finite_rules({rule({0}, 1)}));
  AtomSet y = atoms({0});
  CHECK(f->find_witness(AtomId(0), y, 4));
  CHECK(f->find_witness(AtomId(1), y, 4));
  CHECK_FALSE(f->find_witness(AtomId(2), y, 4));
}

TEST_CASE("presentation operator: witnesses from a base that is not closed") {
  auto f = presentation_operator(finite_rules({rule({0}, 1), rule({1}, 2)}));
  auto w = f->find_witness(AtomId(2), atoms({0}), 8);
  REQUIRE(w);
  CHECK(f->eval(AtomId(2), *w) == std::optional(atoms({0})));
}

TEST_CASE("presentation operator matches brute-force closure on 20 random instances") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto q = finite::random_quasivariety(rng, 1 + rng() % 6, rng() % 13);
    auto f = presentation_operator(q.stream());
    finite::Subset full = finite::full_set(q.n);
    for (finite::Subset y = 0; y <= full; ++y) {
      auto ys = finite::from_mask(y);
      finite::Subset induced = 0;
      for (std::size_t a = 0; a < q.n; ++a) {
        auto w = f->find_witness(AtomId(a), ys, q.rules.size() + 1);
        if (w && value_within(f->eval(AtomId(a), *w), ys)) induced |= 1u << a;
      }
      REQUIRE(induced == finite::brute_closure(q, y));
    }
  }
}

TEST_CASE("apply_operator: identity reproduces the source") {
  auto src = AtomEnumeration::from_set(atoms({3, 5, 7}));
  auto out = apply_operator(*identity_operator(), src, 64);
  CHECK(out.members() == atoms({3, 5, 7}));
  CHECK(apply_operator(*identity_operator(), src, 0).empty());
}

TEST_CASE("apply_operator: presentation of [{0} => 1] over {0} emits 0 then 1") {
  auto f = presentation_operator(finite_rules({rule({0}, 1)}));
  auto out = apply_operator(*f, AtomEnumeration::from_set(atoms({0})), 64);
  REQUIRE(out.size() == 2);
  CHECK(out.log()[0].atom == AtomId(0));
  CHECK(out.log()[1].atom == AtomId(1));
}

TEST_CASE("complement_op_maximal: two-point lattice") {
  auto f = presentation_operator(finite_rules({rule({0}, 1), rule({1}, 0)}));
  auto g = complement_op_maximal(f, AtomId(0));
  std::vector<AtomId> cands{AtomId(0), AtomId(1)};
  auto res = apply_operator_guided(*g, AtomEnumeration{}, cands, 4);
  CHECK(res.emitted.members() == atoms({0, 1}));
}

TEST_CASE("complement_op_maximal: removing x from {x} leaves the empty set") {
  auto g = complement_op_maximal(identity_operator(), AtomId(4));
  CHECK(g->eval(AtomId(4), 0) == std::optional(AtomSet{}));
  CHECK(g->eval(AtomId(3), 0) == std::optional(atoms({4})));
  CHECK_FALSE(g->eval(AtomId(4), 1));
}

TEST_CASE("complement_op_uniform: one-element top equals the maximal operator") {
  auto f = presentation_operator(finite_rules({rule({0}, 1), rule({1}, 0), rule({1, 2}, 3)}));
  auto u = complement_op_uniform(f, {AtomId(2)});
  auto m = complement_op_maximal(f, AtomId(2));
  for (std::uint64_t n = 0; n < 300; ++n)
    for (std::uint64_t x = 0; x < 4; ++x) REQUIRE(u->eval(AtomId(x), n) == m->eval(AtomId(x), n));
  CHECK_THROWS_AS(complement_op_uniform(f, {}), Error);
}

TEST_CASE("complement_op_uniform: bottom in any component is bottom") {
  auto u = complement_op_uniform(identity_operator(), {AtomId(1), AtomId(2)});
  CHECK(u->eval(AtomId(1), codec::tuple_encode({0, 0})) == std::optional(atoms({2})));
  CHECK_FALSE(u->eval(AtomId(1), codec::tuple_encode({0, 1})));
}

TEST_CASE("complement_op_discriminated: a one-atom discriminator is the maximal operator") {
  auto f = presentation_operator(finite_rules({rule({0}, 1), rule({1}, 0)}));
  auto m = complement_op_maximal(f, AtomId(0));
  auto d = complement_op_discriminated(f, AtomEnumeration::from_set(atoms({0})));
  for (std::uint64_t n = 0; n < 200; ++n)
    for (std::uint64_t x = 0; x < 2; ++x)
      REQUIRE(d->eval(AtomId(x), codec::pair(0, n)) == m->eval(AtomId(x), n));
  CHECK_FALSE(d->eval(AtomId(0), codec::pair(1, 0)));
}

TEST_CASE("complement_op_discriminated: late discriminator atoms are bottom") {
  AtomEnumeration e;
  e.emit(AtomId(0), 100);
  auto d = complement_op_discriminated(identity_operator(), e, 64);
  CHECK_FALSE(d->eval(AtomId(1), codec::pair(0, 0)));
  auto wide = complement_op_discriminated(identity_operator(), e, 128);
  CHECK(wide->eval(AtomId(1), codec::pair(0, 0)) == std::optional(atoms({0})));
}

TEST_CASE("converse_presentation_rules: identity gives x => x and every subset is a point") {
  auto s = converse_presentation_rules(identity_operator(), 5);
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto r = s->rule_at(i);
    if (i < 5) {
      REQUIRE(r);
      CHECK(r->premises == std::vector<AtomId>{AtomId(i)});
      CHECK(r->conclusion == AtomId(i));
    } else {
      CHECK_FALSE(r);
    }
  }
  finite::FiniteQuasivariety q(5, materialize_rules(*s, 5, 40));
  CHECK(finite::all_points(q).size() == 32);
}

TEST_CASE("converse_maximal_rules: the top point needs no rules") {
  auto f = finite::brute_reduction(0, finite::full_set(4), 4);
  auto s = converse_maximal_rules(f, 4);
  finite::FiniteQuasivariety q(4, materialize_rules(*s, 4, 16));
  CHECK(q.rules.empty());
  CHECK(q.satisfies(finite::full_set(4)));
}

TEST_CASE("converse_maximal_rules: unbounded layout") {
  auto f = finite::brute_reduction(0b01, 0b10, 2);
  auto s = converse_maximal_rules(f, std::nullopt);
  // x = 0, n = 0, y = 1
  auto r = s->rule_at(codec::pair(0, codec::pair(0, 1)));
  REQUIRE(r);
  CHECK(r->premises == std::vector<AtomId>{AtomId(0), AtomId(1)});
  CHECK(r->conclusion == AtomId(1));
}

TEST_CASE("g_map: an empty value settles immediately") {
  LambdaOperator f([](AtomId x, const Natural& n) -> OperatorValue {
    if (x == AtomId(2) && n == 0) return AtomSet{};
    if (x == AtomId(1)) return atoms({9});
    return std::nullopt;
  });
  std::vector<AtomId> cands{AtomId(1), AtomId(2)};
  auto out = g_map(f, AtomEnumeration::from_set(atoms({1})), cands, 100, 8);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == GMapEntry{AtomId(2), 0});
}

TEST_CASE("recover_from_bound: h = 0 with the identity operator") {
  auto comp = AtomEnumeration::from_set(atoms({1, 3}));
  std::vector<AtomId> cands{AtomId(0), AtomId(1), AtomId(2), AtomId(3)};
  auto out = recover_from_bound(*identity_operator(), [](AtomId) { return 0; }, comp, cands, 1);
  CHECK(out.members() == atoms({1, 3}));
}

TEST_CASE("recover_from_bound: bottom counts as satisfied and large bounds are withheld") {
  LambdaOperator bottom([](AtomId, const Natural&) -> OperatorValue { return std::nullopt; });
  std::vector<AtomId> cands{AtomId(0), AtomId(1)};
  auto out = recover_from_bound(bottom, [](AtomId x) { return x.index == 0 ? 3 : 50; },
                                AtomEnumeration{}, cands, 10);
  CHECK(out.members() == atoms({0}));
}

TEST_CASE("materialize_rules keeps rules inside the universe") {
  auto s = finite_rules({rule({0}, 9), rule({2}, 1), rule({2}, 1)});
  auto rules = materialize_rules(*s, 3, 10);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0] == rule({2}, 1));
}
