#include "qv/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "qv/codec.hpp"
#include "qv/engine.hpp"
#include "qv/finite.hpp"
#include "qv/group.hpp"
#include "qv/ideal.hpp"
#include "qv/operators.hpp"
#include "qv/subshift.hpp"

namespace qv::verify {

namespace {

using finite::FiniteQuasivariety;
using finite::Subset;

constexpr std::size_t kMaxFailureMessages = 8;

template <typename F>
bool expect(SuiteReport& r, bool ok, F&& what) {
  ++r.checks;
  if (!ok) {
    ++r.failure_count;
    if (r.failures.size() < kMaxFailureMessages) r.failures.push_back(what());
  }
  return ok;
}

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

std::string fmt(Subset s) { return finite::format_subset(s); }

std::vector<FiniteQuasivariety> random_instances(std::uint64_t seed, std::size_t count,
                                                 std::size_t max_n, std::size_t max_rules) {
  std::mt19937_64 rng(seed);
  std::vector<FiniteQuasivariety> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
    std::size_t rc = std::uniform_int_distribution<std::size_t>(0, max_rules)(rng);
    out.push_back(finite::random_quasivariety(rng, n, rc, 3));
  }
  return out;
}

std::vector<AtomId> all_atoms(std::size_t n) {
  std::vector<AtomId> v;
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(i);
  return v;
}

std::uint64_t finite_effort(const FiniteQuasivariety& q) { return q.rules.size() + 1; }

Subset guided_mask(const EnumerationOperator& g, Subset source, std::size_t n) {
  auto cands = all_atoms(n);
  auto src = AtomEnumeration::from_set(finite::from_mask(source));
  // Effort is an index limit for finite streams; every rule is below it.
  auto res = apply_operator_guided(g, src, cands, 1u << 10);
  return finite::to_mask(res.emitted.members());
}

/// Smallest-first greedy presentation of the top point.
std::vector<AtomId> top_presentation(const FiniteQuasivariety& q) {
  Subset full = finite::full_set(q.n);
  Subset a = full;
  for (std::size_t i = 0; i < q.n; ++i) {
    Subset t = a & ~(Subset{1} << i);
    if (finite::brute_closure(q, t) == full) a = t;
  }
  if (a == 0) a = 1;  // C(empty) = I; any nonempty set presents I too
  std::vector<AtomId> v;
  for (auto x : finite::from_mask(a)) v.push_back(x);
  return v;
}

// 1 -------------------------------------------------------------------------

void closure_laws(SuiteReport& r, const SuiteOptions& o) {
  auto instances = random_instances(o.seed, 50, 6, 12);
  std::uint64_t presentations = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto s = q.stream();
    std::uint64_t budget = q.rules.size();
    std::size_t count = std::size_t{1} << q.n;
    std::vector<Subset> c(count);
    for (Subset R = 0; R < count; ++R, ++presentations) {
      auto res = closure(finite::from_mask(R), *s, budget);
      c[R] = finite::to_mask(res.derived.members());
      Subset brute = finite::brute_closure(q, R);
      expect(r, res.fixpoint_certified,
             [&] { return cat("instance ", qi, " R=", fmt(R), ": fixpoint not certified"); });
      expect(r, c[R] == brute, [&] {
        return cat("instance ", qi, " R=", fmt(R), ": engine ", fmt(c[R]), " brute ", fmt(brute));
      });
      expect(r, (R & ~c[R]) == 0, [&] { return cat("instance ", qi, " not extensive at ", fmt(R)); });
      auto again = finite::to_mask(closure(finite::from_mask(c[R]), *s, budget).derived.members());
      expect(r, again == c[R], [&] { return cat("instance ", qi, " not idempotent at ", fmt(R)); });
      Subset prev = R;
      for (std::uint64_t b = 0; b <= budget; ++b) {
        Subset cur = finite::to_mask(closure(finite::from_mask(R), *s, b).derived.members());
        expect(r, (prev & ~cur) == 0,
               [&] { return cat("instance ", qi, " budget ", b, " not monotone at ", fmt(R)); });
        prev = cur;
      }
    }
    for (Subset big = 0; big < count; ++big)
      for (Subset small = big;; small = (small - 1) & big) {
        if ((c[small] & ~c[big]) != 0) {
          expect(r, false, [&] {
            return cat("instance ", qi, " not monotone: ", fmt(small), " vs ", fmt(big));
          });
        } else {
          ++r.checks;
        }
        if (small == 0) break;
      }
  }
  r.notes.push_back(cat("instances 50 (N <= 6, <= 12 rules), presentations ", presentations));
}

// 2 -------------------------------------------------------------------------

void presentation(SuiteReport& r, const SuiteOptions& o) {
  constexpr std::uint64_t kBlindCodes = 4096;
  constexpr std::size_t kSequenceLength = 3;
  auto instances = random_instances(o.seed, 50, 6, 12);
  std::uint64_t witnesses = 0;
  std::size_t longest = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto s = q.stream();
    auto f = presentation_operator(s);
    std::size_t count = std::size_t{1} << q.n;
    std::uint64_t rule_count = q.rules.size();
    std::uint64_t n_max_length = q.n * std::max<std::uint64_t>(rule_count, 1);

    // Leaf sets reached by each atom, over every code considered.
    std::vector<std::set<Subset>> leaves(q.n);
    auto record = [&](std::size_t a, const Natural& code) {
      if (auto v = f->eval(AtomId(a), code)) leaves[a].insert(finite::to_mask(*v));
    };
    for (std::size_t a = 0; a < q.n; ++a) {
      for (std::uint64_t code = 0; code < kBlindCodes; ++code) record(a, Natural(code));
      std::vector<std::uint64_t> seq;
      std::function<void()> rec = [&] {
        if (!seq.empty()) record(a, codec::seq_encode64(seq));
        if (seq.size() == kSequenceLength) return;
        for (std::uint64_t i = 0; i < rule_count; ++i) {
          seq.push_back(i);
          rec();
          seq.pop_back();
        }
      };
      rec();
    }
    for (Subset Y = 0; Y < count; ++Y) {
      Subset cy = finite::brute_closure(q, Y);
      auto ya = finite::from_mask(Y);
      for (auto a : finite::from_mask(cy)) {
        auto w = f->find_witness(a, ya, finite_effort(q));
        bool ok = w && value_within(f->eval(a, *w), ya);
        if (ok) {
          ++witnesses;
          auto len = codec::seq_decode(*w).size();
          longest = std::max(longest, len);
          ok = len <= n_max_length;
          leaves[small_index(a)].insert(finite::to_mask(*f->eval(a, *w)));
        }
        expect(r, ok, [&] {
          return cat("instance ", qi, " Y=", fmt(Y), ": no derivation of ", a.index);
        });
      }
    }
    for (Subset Y = 0; Y < count; ++Y) {
      Subset induced = 0;
      for (std::size_t a = 0; a < q.n; ++a)
        for (Subset l : leaves[a])
          if ((l & ~Y) == 0) {
            induced |= Subset{1} << a;
            break;
          }
      Subset cy = finite::brute_closure(q, Y);
      expect(r, induced == cy, [&] {
        return cat("instance ", qi, " Y=", fmt(Y), ": induced ", fmt(induced), " closure ", fmt(cy));
      });
    }
  }
  r.notes.push_back(cat("codes: all n < ", kBlindCodes, ", all sequences of length <= ",
                        kSequenceLength, ", ", witnesses, " witnesses (longest ", longest,
                        " rules)"));
}

// 3 -------------------------------------------------------------------------

void converse_presentation(SuiteReport& r, const SuiteOptions& o) {
  std::mt19937_64 rng(o.seed + 3);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    Subset full = finite::full_set(n);
    Subset a = std::uniform_int_distribution<Subset>(0, full)(rng);
    Subset b = std::uniform_int_distribution<Subset>(0, full)(rng) & a;
    auto f = finite::brute_reduction(a, b, n);
    auto stream = converse_presentation_rules(f, n);
    std::uint64_t limit = 4 * n;
    FiniteQuasivariety g(n, materialize_rules(*stream, n, limit));
    Subset least = finite::brute_closure(g, b);
    expect(r, least == a, [&] {
      return cat("pair ", t, " A=", fmt(a), " B=", fmt(b), ": least point ", fmt(least));
    });
    Subset eng = finite::to_mask(closure(finite::from_mask(b), *stream, limit).derived.members());
    expect(r, eng == a, [&] { return cat("pair ", t, ": engine closure ", fmt(eng)); });
  }
  // The presentation operator of S generates the same points as S.
  constexpr std::uint64_t kCodes = 4096;
  auto instances = random_instances(o.seed, 20, 6, 12);
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto stream = converse_presentation_rules(presentation_operator(q.stream()), q.n);
    FiniteQuasivariety g(q.n, materialize_rules(*stream, q.n, q.n * kCodes));
    expect(r, finite::all_points(g) == finite::all_points(q),
           [&] { return cat("instance ", qi, ": points differ from the presented stream"); });
  }
  r.notes.push_back("pairs 50 (N <= 6), presentation-operator round trip on 20 instances");
}

// 4 -------------------------------------------------------------------------

void maximal_complement(SuiteReport& r, const SuiteOptions& o) {
  auto instances = random_instances(o.seed + 4, 50, 6, 12);
  instances.emplace_back(2, std::vector<HornRule>{HornRule({AtomId(0)}, AtomId(1)),
                                                 HornRule({AtomId(1)}, AtomId(0))});
  std::uint64_t maximal = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto f = presentation_operator(q.stream());
    Subset full = finite::full_set(q.n);
    auto top = top_presentation(q);
    auto uniform = complement_op_uniform(f, top);
    for (Subset x : finite::maximal_points(q)) {
      ++maximal;
      Subset comp = full & ~x;
      for (auto a : finite::from_mask(comp)) {
        auto g = complement_op_maximal(f, a);
        Subset got = guided_mask(*g, x, q.n);
        expect(r, got == comp, [&] {
          return cat("instance ", qi, " X=", fmt(x), " a=", a.index, ": emitted ", fmt(got));
        });
        auto blind = apply_operator(*g, AtomEnumeration::from_set(finite::from_mask(x)), 512);
        Subset b = finite::to_mask(blind.members());
        expect(r, (b & x) == 0,
               [&] { return cat("instance ", qi, " X=", fmt(x), ": blind run emitted a member"); });
      }
      Subset got = guided_mask(*uniform, x, q.n);
      expect(r, got == comp, [&] {
        return cat("instance ", qi, " X=", fmt(x), ": uniform operator emitted ", fmt(got));
      });
    }
  }
  r.notes.push_back(cat("instances ", instances.size(), ", maximal points ", maximal));
}

// 5 -------------------------------------------------------------------------

void below_family(SuiteReport& r, const SuiteOptions& o) {
  constexpr int kMaxExponent = 10;
  auto f = presentation_operator(group::group_rules(1));
  auto g = complement_op_below_family(f, group::z_family(), group::kZFamilyProbe);
  AtomId unit = group::atom_of(group::ReducedWord(), 1);
  auto source = AtomEnumeration::from_set(AtomSet{unit});
  std::vector<AtomId> cands;
  for (int m = -kMaxExponent; m <= kMaxExponent; ++m)
    cands.push_back(group::atom_of(group::ReducedWord::reduce(std::vector<group::Letter>(
                                       static_cast<std::size_t>(std::abs(m)), group::Letter(m < 0 ? 1 : 0))),
                                   1));
  auto res = apply_operator_guided(*g, source, cands, group::kZFamilyEffort);
  for (int m = -kMaxExponent; m <= kMaxExponent; ++m) {
    AtomId x = cands[m + kMaxExponent];
    expect(r, res.emitted.contains(x) == (m != 0), [&] {
      return cat("a^", m, m == 0 ? ": identity certified" : ": not certified");
    });
  }

  auto instances = random_instances(o.seed + 5, 30, 5, 10);
  std::uint64_t points = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto fq = presentation_operator(q.stream());
    Subset full = finite::full_set(q.n);
    auto pts = finite::all_points(q);
    for (Subset x : pts) {
      if (x == full) continue;
      ++points;
      std::vector<Subset> above;
      for (Subset z : pts)
        if (z != x && (x & ~z) == 0) above.push_back(z);
      FiniteFamily fam;
      fam.sets_at = [above](std::uint64_t p) {
        auto s = finite::from_mask(above[std::min<std::uint64_t>(p, above.size() - 1)]);
        return std::vector<AtomId>(s.begin(), s.end());
      };
      fam.size_at = [above](std::uint64_t p) -> std::uint64_t {
        return std::popcount(above[std::min<std::uint64_t>(p, above.size() - 1)]);
      };
      auto gq = complement_op_below_family(fq, fam, above.size());
      Subset got = guided_mask(*gq, x, q.n);
      expect(r, got == (full & ~x), [&] {
        return cat("instance ", qi, " X=", fmt(x), ": emitted ", fmt(got));
      });
    }
  }
  r.notes.push_back(cat("Z demo: |m| <= ", kMaxExponent, " at effort ", group::kZFamilyEffort,
                        ", probe ", group::kZFamilyProbe, "; finite points ", points));
}

// 6 -------------------------------------------------------------------------

void converse_maximality(SuiteReport& r, const SuiteOptions&) {
  constexpr std::size_t n = 5;
  Subset full = finite::full_set(n);
  for (Subset a = 0; a <= full; ++a) {
    auto f = finite::brute_reduction(full & ~a, a, n);
    auto stream = converse_maximal_rules(f, n);
    FiniteQuasivariety q(n, materialize_rules(*stream, n, n * n));
    auto pts = finite::all_points(q);
    expect(r, std::find(pts.begin(), pts.end(), a) != pts.end(),
           [&] { return cat("A=", fmt(a), " is not a point"); });
    for (Subset z : pts)
      if (z != a && (a & ~z) == 0)
        expect(r, z == full, [&] { return cat("A=", fmt(a), ": point ", fmt(z), " above it"); });
    if (a != full) {
      auto mx = finite::maximal_points(q);
      expect(r, std::find(mx.begin(), mx.end(), a) != mx.end(),
             [&] { return cat("A=", fmt(a), " not listed maximal"); });
    }
  }
  r.notes.push_back("all 32 subsets of {0..4}");
}

// 7 -------------------------------------------------------------------------

void discriminator(SuiteReport& r, const SuiteOptions& o) {
  auto instances = random_instances(o.seed + 7, 30, 5, 10);
  std::uint64_t tested = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto s = q.stream();
    auto f = presentation_operator(s);
    Subset full = finite::full_set(q.n);
    for (Subset x : finite::all_points(q)) {
      Subset comp = full & ~x;
      expect(r, finite::is_discriminator(q, x, comp),
             [&] { return cat("instance ", qi, " X=", fmt(x), ": complement rejected"); });
      Subset presented = finite::to_mask(
          closure(finite::from_mask(x), *s, q.rules.size()).derived.members());
      expect(r, presented == x,
             [&] { return cat("instance ", qi, " X=", fmt(x), ": engine closure differs"); });
      for (Subset y = comp;; y = (y - 1) & comp) {
        if (finite::is_discriminator(q, x, y)) {
          ++tested;
          auto g = complement_op_discriminated(f, AtomEnumeration::from_set(finite::from_mask(y)));
          Subset got = guided_mask(*g, x, q.n);
          expect(r, got == comp, [&] {
            return cat("instance ", qi, " X=", fmt(x), " Y=", fmt(y), ": emitted ", fmt(got));
          });
        }
        if (y == 0) break;
      }
    }
  }
  r.notes.push_back(cat("instances 30 (N <= 5), discriminators ", tested));
}

// 8 -------------------------------------------------------------------------

void simple_group(SuiteReport& r, const SuiteOptions&) {
  constexpr std::size_t kMaxLength = 6;
  auto p = group::icosahedral_presentation();
  auto oracle = group::icosahedral_oracle();
  expect(r, oracle.order() == 60, [&] { return cat("oracle order ", oracle.order()); });
  group::GroupWordDecider d(p, group::kDefaultDecideCap);
  std::uint64_t undecided = 0, words = 0, max_ticks = 0;
  for (const auto& w : group::ball(2, kMaxLength)) {
    ++words;
    auto dec = d.decide(w);
    max_ticks = std::max(max_ticks, dec.ticks);
    if (dec.verdict == group::Verdict::kUndecided) {
      ++undecided;
      expect(r, false, [&] { return cat(group::format_word(w), ": Undecided"); });
      continue;
    }
    bool eq = oracle.word_is_identity(w);
    expect(r, (dec.verdict == group::Verdict::kEqual) == eq, [&] {
      return cat(group::format_word(w), ": ", group::to_string(dec.verdict), ", oracle ",
                 eq ? "Equal" : "NotEqual");
    });
  }
  r.notes.push_back(cat("words ", words, " (length <= ", kMaxLength, "), cap ",
                        group::kDefaultDecideCap, ", max ticks ", max_ticks, ", undecided ",
                        undecided));
}

// 9 -------------------------------------------------------------------------

void minimal_subshift(SuiteReport& r, const SuiteOptions&) {
  constexpr std::size_t kLanguageLength = 10;
  constexpr std::size_t kRecoverLength = 8;
  constexpr std::size_t kQuasiCap = 32;
  using namespace subshift;
  Alphabet ab("ab");
  SftPresentation p{ab, {ab.parse("aa"), ab.parse("bb")}};
  expect(r, is_minimal_sft(p), [] { return std::string("orbit SFT not minimal"); });

  auto stream = subshift_rules(2);
  auto f = presentation_operator(stream);
  std::uint64_t budget = sft_closure_budget(2, 2, kLanguageLength);
  AtomSet pres;
  for (const auto& w : p.forbidden) pres.insert(atom_of(w, 2));
  auto forbidden = closure(pres, *stream, budget).derived;

  auto g = complement_op_uniform(f, {atom_of(Word{}, 2)});
  std::vector<AtomId> cands;
  for (const auto& w : words_upto(2, kLanguageLength)) cands.push_back(atom_of(w, 2));
  auto res = apply_operator_guided(*g, forbidden, cands, kLanguageLength + 2);
  AtomSet admissible;
  for (const auto& w : sft_language_oracle(p, kLanguageLength)) admissible.insert(atom_of(w, 2));
  expect(r, res.emitted.members() == admissible, [&] {
    return cat("complement emitted ", res.emitted.size(), " words, oracle ", admissible.size());
  });
  for (const auto& e : res.emitted.log())
    expect(r, !forbidden.contains(e.atom),
           [&] { return cat("emitted forbidden word ", ab.format(word_of(e.atom, 2))); });

  auto lang = sft_language(p);
  std::map<std::size_t, std::uint64_t> g_of_length;
  for (std::size_t n = 0; n <= kRecoverLength; ++n) {
    auto v = quasiperiodicity(lang, n, kQuasiCap);
    expect(r, v.has_value(), [&] { return cat("quasiperiodicity(", n, ") exceeds cap"); });
    g_of_length[n] = v.value_or(kQuasiCap);
  }
  expect(r, g_of_length[1] == 2 && g_of_length[2] == 3,
         [&] { return cat("orbit g(1)=", g_of_length[1], " g(2)=", g_of_length[2]); });
  BoundFunction h = [&](AtomId x) { return g_of_length.at(word_of(x, 2).size()); };
  std::vector<AtomId> short_words;
  for (const auto& w : words_upto(2, kRecoverLength)) short_words.push_back(atom_of(w, 2));
  auto rec = recover_from_bound(*recurrence_operator(2), h, res.emitted, short_words, kQuasiCap);
  AtomSet expected;
  for (const auto& w : sft_forbidden_oracle(p, kRecoverLength)) expected.insert(atom_of(w, 2));
  expect(r, rec.members() == expected, [&] {
    return cat("recovered ", rec.size(), " forbidden words, oracle ", expected.size());
  });

  auto fib = SubstitutionShift::fibonacci().language();
  auto g1 = quasiperiodicity(fib, 1, kQuasiCap);
  expect(r, g1 == std::optional<std::size_t>(3),
         [&] { return cat("Fibonacci g(1) = ", g1 ? std::to_string(*g1) : ">cap"); });
  r.notes.push_back(cat("closure budget ", budget, ", admissible to length ", kLanguageLength,
                        ", forbidden recovered to length ", kRecoverLength));
}

// 10 ------------------------------------------------------------------------

void g_map_suite(SuiteReport& r, const SuiteOptions& o) {
  constexpr std::uint64_t kBudget = 1u << 20;
  auto instances = random_instances(o.seed + 10, 30, 5, 10);
  std::uint64_t entries = 0;
  Natural largest = 0;
  for (std::size_t qi = 0; qi < instances.size(); ++qi) {
    const auto& q = instances[qi];
    auto f = presentation_operator(q.stream());
    Subset full = finite::full_set(q.n);
    auto atoms = all_atoms(q.n);
    for (Subset x : finite::maximal_points(q)) {
      Subset comp = full & ~x;
      AtomId a = *finite::from_mask(comp).begin();
      auto g = complement_op_maximal(f, a);
      AtomSet xs = finite::from_mask(x);
      auto gm = g_map(*g, AtomEnumeration::from_set(xs), atoms, kBudget, finite_effort(q));
      std::map<AtomId, Natural> gv;
      for (const auto& e : gm) {
        ++entries;
        gv[e.x] = e.g_value;
        largest = std::max(largest, e.g_value);
        bool ok = value_within(g->eval(e.x, e.g_value), xs);
        for (Natural i = 0; ok && i < e.g_value; ++i) ok = !value_within(g->eval(e.x, i), xs);
        expect(r, ok, [&] {
          return cat("instance ", qi, " X=", fmt(x), " x=", e.x.index, ": g ", e.g_value,
                     " is not the minimum");
        });
      }
      Subset emitted = 0;
      for (const auto& [atom, _] : gv) emitted |= Subset{1} << small_index(atom);
      expect(r, emitted == comp, [&] {
        return cat("instance ", qi, " X=", fmt(x), ": entries for ", fmt(emitted));
      });
      std::uint64_t hmax = 0;
      for (const auto& [_, v] : gv) hmax = std::max(hmax, small_index(v));
      BoundFunction h = [&](AtomId y) {
        auto it = gv.find(y);
        return it == gv.end() ? std::uint64_t{0} : small_index(it->second);
      };
      auto rec = recover_from_bound(*g, h, AtomEnumeration::from_set(finite::from_mask(comp)),
                                    atoms, hmax + 1);
      expect(r, finite::to_mask(rec.members()) == x, [&] {
        return cat("instance ", qi, " X=", fmt(x), ": recovered ",
                   fmt(finite::to_mask(rec.members())));
      });
    }
  }
  r.notes.push_back(cat("entries ", entries, ", largest g ", largest));
}

// 11 ------------------------------------------------------------------------

std::vector<finite::PartialMap> all_maps(std::size_t n) {
  std::vector<finite::PartialMap> out;
  Subset full = finite::full_set(n);
  for (Subset ones = 0; ones <= full; ++ones)
    for (Subset zeros = 0; zeros <= full; ++zeros)
      if ((ones & zeros) == 0 && (ones | zeros) != 0) out.push_back({ones, zeros});
  return out;
}

std::vector<Subset> class_points(const finite::PartialMapFamily& fam) {
  std::vector<Subset> out;
  for (Subset x = 0; x <= finite::full_set(fam.n); ++x)
    if (fam.in_class(x)) out.push_back(x);
  return out;
}

bool check_family(SuiteReport& r, const finite::PartialMapFamily& fam) {
  auto diag = finite::diagnose_class(fam);
  if (!diag.ok) {
    bool threw = false;
    try {
      finite::pi01_to_rules(fam);
    } catch (const Error&) {
      threw = true;
    }
    expect(r, threw, [&] { return cat("conversion accepted a failing family: ", diag.reason); });
    return false;
  }
  auto q = finite::pi01_to_rules(fam);
  expect(r, finite::all_points(q) == class_points(fam), [&] {
    return cat("converted points differ:\n", finite::format_partial_map_file(fam));
  });
  return true;
}

void pi01(SuiteReport& r, const SuiteOptions& o) {
  auto maps3 = all_maps(3);
  std::uint64_t passing3 = 0, families3 = 0;
  for (std::size_t i = 0; i <= maps3.size(); ++i)
    for (std::size_t j = i; j <= maps3.size(); ++j)
      for (std::size_t k = j; k <= maps3.size(); ++k) {
        // Index maps3.size() stands for "no map"; keep each family once.
        std::vector<finite::PartialMap> maps;
        for (std::size_t t : {i, j, k})
          if (t < maps3.size()) maps.push_back(maps3[t]);
        bool distinct = (i < j || i == maps3.size()) && (j < k || j == maps3.size());
        if (!distinct) continue;
        ++families3;
        if (check_family(r, finite::PartialMapFamily(3, maps))) ++passing3;
      }

  constexpr std::uint64_t kSamples = 200;
  constexpr std::uint64_t kMaxAttempts = 1u << 20;
  auto maps4 = all_maps(4);
  std::mt19937_64 rng(o.seed + 11);
  std::uniform_int_distribution<std::size_t> pick(0, maps4.size() - 1);
  std::uniform_int_distribution<std::size_t> how_many(1, 3);
  std::uint64_t passing4 = 0, attempts = 0;
  while (passing4 < kSamples && attempts < kMaxAttempts) {
    ++attempts;
    std::vector<finite::PartialMap> maps;
    for (std::size_t t = how_many(rng); t > 0; --t) maps.push_back(maps4[pick(rng)]);
    if (check_family(r, finite::PartialMapFamily(4, maps))) ++passing4;
  }
  expect(r, passing4 == kSamples,
         [&] { return cat("only ", passing4, " passing N = 4 families sampled"); });
  r.notes.push_back(cat("N = 3: ", families3, " families, ", passing3, " pass; N = 4: ",
                        passing4, " passing of ", attempts, " sampled"));
}

// 12 ------------------------------------------------------------------------

void ideal_demo(SuiteReport& r, const SuiteOptions&) {
  using namespace ideal;
  Poly p = parse_poly("t^2+1");
  std::uint64_t budget = ideal_closure_budget(p, 2);
  auto rep = maximal_ideal_demo(p, budget, 4);
  expect(r, rep.checked == count_upto(4),
         [&] { return cat("checked ", rep.checked, " polynomials"); });
  for (const auto& q : rep.unsound)
    expect(r, false, [&] { return cat("certified member ", format_poly(q)); });
  for (const auto& q : rep.missed)
    expect(r, false, [&] { return cat("missed non-member ", format_poly(q)); });
  expect(r, rep.emitted_nonmembers == 0,
         [&] { return cat(rep.emitted_nonmembers, " non-members in the enumeration"); });
  auto certified = [&](const std::string& s) {
    Poly q = parse_poly(s);
    return std::find(rep.certified.begin(), rep.certified.end(), q) != rep.certified.end();
  };
  expect(r, certified("t"), [] { return std::string("t not certified"); });
  expect(r, !certified("t^4-1"), [] { return std::string("t^4-1 certified"); });
  expect(r, rep.certified.size() + rep.members == rep.checked,
         [&] { return cat("certified ", rep.certified.size(), " members ", rep.members); });
  r.notes.push_back(cat("p = t^2+1, budget ", budget, ", heights <= 4: ", rep.checked,
                        " polynomials, ", rep.members, " members, ", rep.certified.size(),
                        " certified"));
}

struct Suite {
  std::string name;
  void (*run)(SuiteReport&, const SuiteOptions&);
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {"closure-laws", closure_laws},
      {"presentation", presentation},
      {"converse-presentation", converse_presentation},
      {"maximal-complement", maximal_complement},
      {"below-family", below_family},
      {"converse-maximality", converse_maximality},
      {"discriminator", discriminator},
      {"simple-group", simple_group},
      {"minimal-subshift", minimal_subshift},
      {"g-map", g_map_suite},
      {"pi01", pi01},
      {"ideal-demo", ideal_demo},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : suites()) v.push_back(s.name);
    return v;
  }();
  return names;
}

std::optional<SuiteReport> run_suite(const std::string& name, const SuiteOptions& opts) {
  for (const auto& s : suites()) {
    if (s.name != name) continue;
    SuiteReport r;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      s.run(r, opts);
    } catch (const std::exception& e) {
      expect(r, false, [&] { return cat("exception: ", e.what()); });
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  return std::nullopt;
}

}  // namespace qv::verify
