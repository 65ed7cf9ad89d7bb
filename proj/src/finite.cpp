#include "qv/finite.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <sstream>

#include "qv/text.hpp"

namespace qv::finite {

Subset full_set(std::size_t n) {
  return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1;
}

Subset to_mask(const AtomSet& atoms) {
  Subset m = 0;
  for (auto a : atoms) {
    if (a.index >= 32) throw RangeError("atom index beyond the finite mask width");
    m |= Subset{1} << static_cast<unsigned>(a.index);
  }
  return m;
}

AtomSet from_mask(Subset mask) {
  AtomSet out;
  for (std::uint64_t i = 0; i < 32; ++i)
    if (mask >> i & 1) out.insert(AtomId{i});
  return out;
}

std::string format_subset(Subset mask) {
  std::string s = "{";
  bool first = true;
  for (unsigned i = 0; i < 32; ++i)
    if (mask >> i & 1) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
  return s + "}";
}

FiniteQuasivariety::FiniteQuasivariety(std::size_t n_, std::vector<HornRule> rules_)
    : n(n_), rules(std::move(rules_)) {
  if (n > 32) throw GuardError("finite universe larger than 32 atoms");
  for (const auto& r : rules) {
    if (r.conclusion.index >= n) throw Error("rule atom out of range");
    for (auto p : r.premises)
      if (p.index >= n) throw Error("rule atom out of range");
  }
  std::sort(rules.begin(), rules.end());
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
}

RuleStreamPtr FiniteQuasivariety::stream() const {
  return std::make_shared<FiniteRuleStream>(rules);
}

namespace {

struct MaskRule {
  Subset premises;
  Subset conclusion;
};

std::vector<MaskRule> mask_rules(const FiniteQuasivariety& q) {
  std::vector<MaskRule> out;
  for (const auto& r : q.rules) {
    Subset p = 0;
    for (auto a : r.premises) p |= Subset{1} << static_cast<unsigned>(a.index);
    out.push_back({p, Subset{1} << static_cast<unsigned>(r.conclusion.index)});
  }
  return out;
}

void guard_points(std::size_t n) {
  if (n > kMaxPointsUniverse)
    throw GuardError("point enumeration is limited to universes of " +
                     std::to_string(kMaxPointsUniverse) + " atoms");
}

}  // namespace

bool FiniteQuasivariety::satisfies(Subset x) const {
  for (const auto& r : mask_rules(*this))
    if ((x & r.premises) == r.premises && !(x & r.conclusion)) return false;
  return true;
}

std::vector<Subset> all_points(const FiniteQuasivariety& q) {
  guard_points(q.n);
  auto rules = mask_rules(q);
  std::vector<Subset> out;
  const std::uint64_t count = std::uint64_t{1} << q.n;
  for (std::uint64_t x = 0; x < count; ++x) {
    auto s = static_cast<Subset>(x);
    bool ok = std::all_of(rules.begin(), rules.end(), [&](const MaskRule& r) {
      return (s & r.premises) != r.premises || (s & r.conclusion);
    });
    if (ok) out.push_back(s);
  }
  return out;
}

Subset brute_closure(const FiniteQuasivariety& q, Subset r) {
  auto rules = mask_rules(q);
  Subset x = r;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& rule : rules)
      if ((x & rule.premises) == rule.premises && !(x & rule.conclusion)) {
        x |= rule.conclusion;
        changed = true;
      }
  }
  return x;
}

Subset meet(const FiniteQuasivariety& q, Subset x, Subset y) {
  if (!q.satisfies(x) || !q.satisfies(y)) throw Error("meet: argument is not a point");
  return x & y;
}

Subset join(const FiniteQuasivariety& q, Subset x, Subset y) {
  if (!q.satisfies(x) || !q.satisfies(y)) throw Error("join: argument is not a point");
  return brute_closure(q, x | y);
}

std::vector<Subset> maximal_points(const FiniteQuasivariety& q) {
  auto points = all_points(q);
  const Subset top = full_set(q.n);
  std::vector<Subset> out;
  for (auto x : points) {
    if (x == top) continue;
    bool maximal = std::none_of(points.begin(), points.end(), [&](Subset y) {
      return y != x && y != top && (x & y) == x;
    });
    if (maximal) out.push_back(x);
  }
  return out;
}

bool is_discriminator(const FiniteQuasivariety& q, Subset x, Subset y) {
  if (x & y) return false;
  for (auto p : all_points(q))
    if (p != x && (p & x) == x && !(p & y)) return false;
  return true;
}

// ---------------------------------------------------------------------------

PartialMapFamily::PartialMapFamily(std::size_t n_, std::vector<PartialMap> maps_)
    : n(n_), maps(std::move(maps_)) {
  if (n > 32) throw GuardError("finite universe larger than 32 atoms");
  const Subset top = full_set(n);
  for (const auto& m : maps) {
    if ((m.ones | m.zeros) & ~top) throw Error("partial map index out of range");
    if (m.ones & m.zeros) throw Error("partial map assigns both values to one atom");
    if ((m.ones | m.zeros) == 0) throw Error("partial map with empty domain");
  }
}

bool PartialMapFamily::in_class(Subset x) const {
  return std::none_of(maps.begin(), maps.end(), [&](const PartialMap& m) { return m.agrees_with(x); });
}

namespace {

std::string format_map(const PartialMap& m) {
  std::string s;
  for (unsigned i = 0; i < 32; ++i) {
    if (m.ones >> i & 1) s += (s.empty() ? "+" : " +") + std::to_string(i);
    if (m.zeros >> i & 1) s += (s.empty() ? "-" : " -") + std::to_string(i);
  }
  return s;
}

// cl[X] = intersection of all class members containing X.
std::vector<Subset> class_closure_table(const PartialMapFamily& fam) {
  const std::size_t n = fam.n;
  const Subset top = full_set(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Subset> cl(count, top);
  for (std::uint64_t x = 0; x < count; ++x)
    if (fam.in_class(static_cast<Subset>(x))) cl[x] = static_cast<Subset>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const Subset bit = Subset{1} << i;
    for (std::uint64_t x = 0; x < count; ++x)
      if (!(x & bit)) cl[x] &= cl[x | bit];
  }
  return cl;
}

}  // namespace

ClassCheck diagnose_class(const PartialMapFamily& fam) {
  if (fam.n > kMaxClassCheckUniverse)
    throw GuardError("intersection check is limited to universes of " +
                     std::to_string(kMaxClassCheckUniverse) + " atoms");
  const Subset top = full_set(fam.n);
  for (const auto& m : fam.maps)
    if (m.agrees_with(top))
      return {false, "map '" + format_map(m) + "' excludes the full set"};

  auto cl = class_closure_table(fam);
  const std::uint64_t count = std::uint64_t{1} << fam.n;
  for (std::uint64_t xi = 0; xi < count; ++xi) {
    auto x = static_cast<Subset>(xi);
    if (fam.in_class(x) || cl[x] != x) continue;
    // x is the intersection of the members above it; fold them until the
    // running intersection leaves the class.
    Subset acc = top;
    for (std::uint64_t yi = count; yi-- > 0;) {
      auto y = static_cast<Subset>(yi);
      if ((y & x) != x || !fam.in_class(y)) continue;
      Subset next = acc & y;
      if (!fam.in_class(next))
        return {false, "points " + format_subset(acc) + " and " + format_subset(y) +
                           " intersect in " + format_subset(next) + ", outside the class"};
      acc = next;
    }
  }
  return {};
}

bool check_intersection_closed(const PartialMapFamily& fam) { return diagnose_class(fam).ok; }

FiniteQuasivariety pi01_to_rules(const PartialMapFamily& fam) {
  auto check = diagnose_class(fam);
  if (!check.ok) throw Error("precondition failed: " + check.reason);
  auto cl = class_closure_table(fam);
  std::vector<HornRule> rules;
  auto premises_of = [](Subset s) {
    std::vector<AtomId> v;
    for (auto a : from_mask(s)) v.push_back(a);
    return v;
  };
  for (const auto& m : fam.maps) {
    if (std::popcount(m.zeros) == 1) {
      rules.emplace_back(premises_of(m.ones), AtomId{static_cast<std::uint64_t>(std::countr_zero(m.zeros))});
      continue;
    }
    // Split into the one-zero maps (ones, {b}); keep those excluded from the
    // whole class, i.e. b in cl(ones). At least one is, since the class is
    // intersection closed.
    for (auto b : from_mask(m.zeros))
      if (cl[m.ones] >> static_cast<unsigned>(b.index) & 1) rules.emplace_back(premises_of(m.ones), b);
  }
  return FiniteQuasivariety(fam.n, std::move(rules));
}

OperatorPtr brute_reduction(Subset a, Subset b, std::size_t n) {
  if ((a | b) & ~full_set(n)) throw Error("brute_reduction: set out of range");
  AtomSet bset = from_mask(b);
  return std::make_shared<LambdaOperator>(
      [a, bset](AtomId x, const Natural& k) -> OperatorValue {
        if (k != 0 || x.index >= 32 || !(a >> static_cast<unsigned>(x.index) & 1)) return std::nullopt;
        return bset;
      });
}

// ---------------------------------------------------------------------------

namespace {

std::size_t parse_finite_header(text::LineReader& reader) {
  auto header = reader.next_header();
  if (header.size() != 3 || header[0] != "universe" || header[1] != "finite")
    throw ParseError("expected header 'universe finite <n>'", reader.line());
  auto n = text::parse_u64(header[2], reader.line());
  if (n > 32) throw GuardError("finite universe larger than 32 atoms");
  return static_cast<std::size_t>(n);
}

AtomId parse_atom(const std::string& tok, std::size_t n, int line) {
  auto v = text::parse_u64(tok, line);
  if (v >= n) throw ParseError("atom " + tok + " out of range", line);
  return AtomId{v};
}

}  // namespace

FiniteQuasivariety parse_rule_file(std::istream& in) {
  text::LineReader reader(in);
  std::size_t n = parse_finite_header(reader);
  std::vector<HornRule> rules;
  std::vector<std::string> toks;
  while (reader.next(toks)) {
    auto arrow = std::find(toks.begin(), toks.end(), "->");
    if (arrow == toks.end() || arrow + 2 != toks.end())
      throw ParseError("expected '<premises> -> <conclusion>'", reader.line());
    std::vector<AtomId> prem;
    for (auto it = toks.begin(); it != arrow; ++it) prem.push_back(parse_atom(*it, n, reader.line()));
    rules.emplace_back(std::move(prem), parse_atom(*(arrow + 1), n, reader.line()));
  }
  return FiniteQuasivariety(n, std::move(rules));
}

PartialMapFamily parse_partial_map_file(std::istream& in) {
  text::LineReader reader(in);
  std::size_t n = parse_finite_header(reader);
  std::vector<PartialMap> maps;
  std::vector<std::string> toks;
  while (reader.next(toks)) {
    PartialMap m;
    for (const auto& t : toks) {
      if (t.size() < 2 || (t[0] != '+' && t[0] != '-'))
        throw ParseError("expected '+<i>' or '-<j>', got '" + t + "'", reader.line());
      AtomId a = parse_atom(t.substr(1), n, reader.line());
      Subset bit = Subset{1} << static_cast<unsigned>(a.index);
      if ((m.ones | m.zeros) & bit)
        throw ParseError("atom " + t.substr(1) + " assigned twice", reader.line());
      (t[0] == '+' ? m.ones : m.zeros) |= bit;
    }
    maps.push_back(m);
  }
  try {
    return PartialMapFamily(n, std::move(maps));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

std::string format_rule_file(const FiniteQuasivariety& q) {
  std::ostringstream out;
  out << "universe finite " << q.n << "\n";
  for (const auto& r : q.rules) {
    for (auto p : r.premises) out << p.index << " ";
    out << "-> " << r.conclusion.index << "\n";
  }
  return out.str();
}

std::string format_partial_map_file(const PartialMapFamily& fam) {
  std::ostringstream out;
  out << "universe finite " << fam.n << "\n";
  for (const auto& m : fam.maps) out << format_map(m) << "\n";
  return out.str();
}

FiniteQuasivariety random_quasivariety(std::mt19937_64& rng, std::size_t n,
                                       std::size_t rule_count, std::size_t max_premises) {
  std::uniform_int_distribution<std::uint64_t> atom(0, n - 1);
  std::uniform_int_distribution<std::size_t> width(0, max_premises);
  std::vector<HornRule> rules;
  for (std::size_t i = 0; i < rule_count; ++i) {
    std::vector<AtomId> prem;
    for (std::size_t k = width(rng); k > 0; --k) prem.push_back(AtomId{atom(rng)});
    rules.emplace_back(std::move(prem), AtomId{atom(rng)});
  }
  return FiniteQuasivariety(n, std::move(rules));
}

}  // namespace qv::finite
