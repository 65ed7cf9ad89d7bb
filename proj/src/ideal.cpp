#include "qv/ideal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "qv/codec.hpp"

namespace qv::ideal {

namespace mp = boost::multiprecision;

Natural rational_height(const Rational& r) {
  if (r == 0) return 0;
  Natural p = abs(mp::numerator(r));
  Natural q = mp::denominator(r);
  return p > q ? p : q;
}

// ---------------------------------------------------------------------------

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::constant(const Rational& c) { return Poly({c}); }

Poly Poly::monomial(const Rational& c, std::size_t k) {
  std::vector<Rational> v(k + 1);
  v[k] = c;
  return Poly(std::move(v));
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

const Rational& Poly::lead() const {
  if (c_.empty()) throw Error("the zero polynomial has no leading coefficient");
  return c_.back();
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return Poly(std::move(v));
}

Poly operator-(const Poly& a) {
  std::vector<Rational> v = a.c_;
  for (auto& x : v) x = -x;
  return Poly(std::move(v));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(v));
}

DivMod divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error("division by the zero polynomial");
  Poly q;
  Poly r = a;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    auto k = static_cast<std::size_t>(r.degree() - b.degree());
    Poly term = Poly::monomial(r.lead() / b.lead(), k);
    q = q + term;
    r = r - term * b;
  }
  return {q, r};
}

Bezout extended_gcd(const Poly& a, const Poly& b) {
  // invariant: r0 = u0 a + v0 b, r1 = u1 a + v1 b
  Poly r0 = a, r1 = b;
  Poly u0 = Poly::constant(1), u1;
  Poly v0, v1 = Poly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly u2 = u0 - q * u1;
    Poly v2 = v0 - q * v1;
    u0 = std::move(u1);
    u1 = std::move(u2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (r0.is_zero()) return {};
  Poly inv = Poly::constant(1 / r0.lead());
  return {r0 * inv, u0 * inv, v0 * inv};
}

Natural height(const Poly& p) {
  if (p.is_zero()) return 0;
  Natural m = 0;
  for (const auto& c : p.coeffs()) m = std::max(m, rational_height(c));
  return m + p.degree();
}

// ---------------------------------------------------------------------------

namespace {

Rational parse_coef(const std::string& text, std::size_t& i) {
  auto digits = [&]() {
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) throw ParseError("expected digits at position " + std::to_string(start) + " in '" + text + "'");
    return Natural(text.substr(start, i - start));
  };
  Natural num = digits();
  Natural den = 1;
  if (i < text.size() && text[i] == '/') {
    ++i;
    den = digits();
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  }
  return Rational(num, den);
}

std::string format_rational(const Rational& r) {
  std::string s = mp::numerator(r).str();
  if (mp::denominator(r) != 1) s += "/" + mp::denominator(r).str();
  return s;
}

}  // namespace

Poly parse_poly(const std::string& text) {
  if (text.empty()) throw ParseError("empty polynomial literal");
  Poly acc;
  std::size_t i = 0;
  bool first = true;
  while (i < text.size()) {
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
      if (first && text[i] == '+') throw ParseError("leading '+' in '" + text + "'");
      neg = text[i] == '-';
      ++i;
    } else if (!first) {
      throw ParseError("expected '+' or '-' at position " + std::to_string(i) + " in '" + text + "'");
    }
    first = false;
    if (i >= text.size()) throw ParseError("dangling sign in '" + text + "'");
    Rational c = 1;
    bool has_coef = false;
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      c = parse_coef(text, i);
      has_coef = true;
    }
    std::size_t k = 0;
    if (i < text.size() && text[i] == 't') {
      ++i;
      k = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start || i - start > 6) throw ParseError("bad exponent in '" + text + "'");
        k = std::stoul(text.substr(start, i - start));
      }
    } else if (!has_coef) {
      throw ParseError("unexpected character at position " + std::to_string(i) + " in '" + text + "'");
    }
    acc = acc + Poly::monomial(neg ? -c : c, k);
  }
  return acc;
}

std::string format_poly(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  const auto& c = p.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) {
    if (c[k] == 0) continue;
    Rational a = abs(c[k]);
    if (c[k] < 0)
      out += "-";
    else if (!out.empty())
      out += "+";
    if (k == 0 || a != 1) out += format_rational(a);
    if (k >= 1) out += "t";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Codec tables. R(m) = number of rationals of height <= m.

namespace {

std::uint64_t totient(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

class Tables {
 public:
  static Tables& get() {
    static Tables t;
    return t;
  }

  std::uint64_t R(std::uint64_t m) {
    std::lock_guard<std::mutex> lock(mu_);
    return R_locked(m);
  }

  // Rationals of height exactly m, ascending.
  const std::vector<Rational>& level(std::uint64_t m) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = levels_.find(m);
    if (it != levels_.end()) return it->second;
    std::vector<Rational> pos;
    if (m == 1) {
      pos.push_back(1);
    } else {
      for (std::uint64_t p = 1; p < m; ++p)
        if (std::gcd(p, m) == 1) pos.emplace_back(Natural(p), Natural(m));
      for (std::uint64_t q = m; q-- > 1;)
        if (std::gcd(q, m) == 1) pos.emplace_back(Natural(m), Natural(q));
    }
    std::vector<Rational> all;
    for (auto it2 = pos.rbegin(); it2 != pos.rend(); ++it2) all.push_back(-*it2);
    all.insert(all.end(), pos.begin(), pos.end());
    return levels_.emplace(m, std::move(all)).first->second;
  }

  // Polynomials of height <= h.
  Natural count_upto(std::uint64_t h) {
    std::lock_guard<std::mutex> lock(mu_);
    if (cumulative_.empty()) cumulative_.push_back(1);
    while (cumulative_.size() <= h) {
      std::uint64_t hh = cumulative_.size();
      Natural lev = 0;
      for (std::uint64_t d = 0; d < hh; ++d) lev += L_locked(d, hh - d);
      cumulative_.push_back(cumulative_.back() + lev);
    }
    return cumulative_[h];
  }

  // Degree-d polynomials whose largest coefficient height is exactly m.
  Natural L(std::uint64_t d, std::uint64_t m) {
    std::lock_guard<std::mutex> lock(mu_);
    return L_locked(d, m);
  }

 private:
  std::uint64_t R_locked(std::uint64_t m) {
    if (R_.empty()) R_ = {1, 3};
    while (R_.size() <= m) R_.push_back(R_.back() + 4 * totient(R_.size()));
    return R_[m];
  }

  Natural L_locked(std::uint64_t d, std::uint64_t m) {
    Natural rm = R_locked(m), rl = R_locked(m - 1);
    return (rm - 1) * mp::pow(rm, static_cast<unsigned>(d)) - (rl - 1) * mp::pow(rl, static_cast<unsigned>(d));
  }

  std::mutex mu_;
  std::vector<std::uint64_t> R_;
  std::map<std::uint64_t, std::vector<Rational>> levels_;
  std::vector<Natural> cumulative_;
};

constexpr std::uint64_t kMaxHeight = 1u << 20;

std::uint64_t small_height(const Natural& h) {
  if (h > kMaxHeight) throw RangeError("polynomial height beyond the codec guard");
  return static_cast<std::uint64_t>(h);
}

std::uint64_t rational_rank(const Rational& r) {
  std::uint64_t m = small_height(rational_height(r));
  if (m == 0) return 0;
  auto& t = Tables::get();
  const auto& lev = t.level(m);
  auto it = std::lower_bound(lev.begin(), lev.end(), r);
  return t.R(m - 1) + static_cast<std::uint64_t>(it - lev.begin());
}

Rational rational_unrank(std::uint64_t x) {
  if (x == 0) return 0;
  auto& t = Tables::get();
  std::uint64_t m = 1;
  while (t.R(m) <= x) ++m;
  return t.level(m)[x - t.R(m - 1)];
}

}  // namespace

Natural count_upto(std::uint64_t h) { return Tables::get().count_upto(h); }

Natural rank(const Poly& p) {
  if (p.is_zero()) return 0;
  auto& t = Tables::get();
  const std::uint64_t h = small_height(height(p));
  const auto d = static_cast<std::uint64_t>(p.degree());
  const std::uint64_t m = h - d;
  Natural out = t.count_upto(h - 1);
  for (std::uint64_t e = 0; e < d; ++e) out += t.L(e, h - e);
  const Natural rm = t.R(m), rl = t.R(m - 1);
  bool hit = false;
  const auto& c = p.coeffs();
  for (std::uint64_t j = d + 1; j-- > 0;) {
    const auto rem = static_cast<unsigned>(j);
    const Natural P = mp::pow(rm, rem), Q = mp::pow(rl, rem);
    const Natural digit = rational_rank(c[j]);
    const Natural lo = (j == d) ? 1 : 0;
    Natural n_low = std::max<Natural>(0, std::min(digit, rl) - lo);
    Natural n_high = std::max<Natural>(0, digit - std::max(lo, rl));
    out += n_high * P + n_low * (hit ? P : P - Q);
    if (rational_height(c[j]) == m) hit = true;
  }
  return out;
}

Poly unrank(const Natural& i) {
  if (i == 0) return {};
  auto& t = Tables::get();
  std::uint64_t h = 1;
  while (t.count_upto(h) <= i) {
    ++h;
    if (h > kMaxHeight) throw RangeError("polynomial rank beyond the codec guard");
  }
  Natural o = i - t.count_upto(h - 1);
  std::uint64_t d = 0;
  for (;; ++d) {
    Natural l = t.L(d, h - d);
    if (o < l) break;
    o -= l;
  }
  const std::uint64_t m = h - d;
  const Natural rm = t.R(m), rl = t.R(m - 1);
  std::vector<Rational> c(d + 1);
  bool hit = false;
  for (std::uint64_t j = d + 1; j-- > 0;) {
    const auto rem = static_cast<unsigned>(j);
    const Natural P = mp::pow(rm, rem), Q = mp::pow(rl, rem);
    const Natural lo = (j == d) ? 1 : 0;
    const Natural n_low = std::max<Natural>(0, rl - lo);
    const Natural b_low = hit ? P : P - Q;
    Natural digit;
    if (o < n_low * b_low) {
      digit = lo + o / b_low;
      o %= b_low;
    } else {
      o -= n_low * b_low;
      digit = std::max(lo, rl) + o / P;
      o %= P;
      hit = true;
    }
    c[j] = rational_unrank(static_cast<std::uint64_t>(digit));
  }
  return Poly(std::move(c));
}

AtomId atom_of(const Poly& p) { return AtomId{rank(p)}; }
Poly poly_of(const AtomId& a) { return unrank(a.index); }

std::vector<Poly> polys_upto(std::uint64_t h) {
  Natural n = count_upto(h);
  std::vector<Poly> out;
  for (Natural i = 0; i < n; ++i) out.push_back(unrank(i));
  return out;
}

// ---------------------------------------------------------------------------

RuleIndex negation_rule_index(const Poly& a) { return 1 + 3 * rank(a); }

RuleIndex sum_rule_index(const Poly& a, const Poly& b) {
  return 2 + 3 * codec::pair(rank(a), rank(b));
}

RuleIndex multiple_rule_index(const Poly& a, const Poly& f) {
  return 3 + 3 * codec::pair(rank(a), rank(f));
}

namespace {

std::optional<std::uint64_t> partner_bound(std::uint64_t g, std::uint64_t jmax) {
  auto fits = [&](std::uint64_t h) {
    auto v = codec::try_pair64(g, h);
    return v && *v <= jmax;
  };
  if (!fits(0)) return std::nullopt;
  std::uint64_t lo = 0, hi = 1;
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::uint64_t triangular_root(std::uint64_t n) {
  auto s = static_cast<std::uint64_t>(std::sqrt(2.0L * static_cast<long double>(n)));
  auto tri = [](std::uint64_t x) { return static_cast<unsigned __int128>(x) * (x + 1) / 2; };
  while (s > 0 && tri(s) > n) --s;
  while (tri(s + 1) <= n) ++s;
  return s;
}

class IdealRules final : public RuleStream {
 public:
  std::optional<HornRule> rule_at(RuleIndex i) const override {
    if (i == 0) return HornRule({}, AtomId{0});
    const RuleIndex ip = i - 1;
    const Natural j = ip / 3;
    try {
      switch (static_cast<int>(ip % 3)) {
        case 0:
          return HornRule({AtomId{j}}, atom_of(-unrank(j)));
        case 1: {
          auto [a, b] = codec::unpair(j);
          return HornRule({AtomId{a}, AtomId{b}}, atom_of(unrank(a) + unrank(b)));
        }
        default: {
          auto [a, f] = codec::unpair(j);
          return HornRule({AtomId{a}}, atom_of(unrank(f) * unrank(a)));
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

  void for_each_triggered(AtomId fresh, const KnownAtoms& known, RuleIndex limit,
                          const RuleSink& sink) const override {
    if (limit <= 1 || fresh.index > std::numeric_limits<std::uint64_t>::max()) return;
    const std::uint64_t r = small_index(fresh);
    const Poly v = unrank(fresh.index);
    auto emit = [&](const RuleIndex& idx, std::vector<AtomId> prem, const Poly& c) {
      if (idx >= limit) return;
      sink(idx, HornRule(std::move(prem), atom_of(c)));
    };
    emit(1 + 3 * Natural(r), {fresh}, -v);

    const std::uint64_t jmax =
        small_index(std::min<Natural>((limit - 2) / 3, std::numeric_limits<std::uint64_t>::max()));
    if (auto pb = partner_bound(r, jmax)) {
      for (std::uint64_t f = 0; f <= *pb; ++f)
        emit(3 + 3 * codec::pair(Natural(r), Natural(f)), {fresh}, unrank(Natural(f)) * v);
      known.for_each_upto(*pb, [&](AtomId b) {
        emit(2 + 3 * codec::pair(Natural(r), b.index), {fresh, b}, v + unrank(b.index));
      });
    }
    std::uint64_t s = triangular_root(jmax);
    if (s < r) return;
    known.for_each_upto(s - r, [&](AtomId a) {
      emit(2 + 3 * codec::pair(a.index, Natural(r)), {a, fresh}, unrank(a.index) + v);
    });
  }
};

}  // namespace

RuleStreamPtr ideal_rules() { return std::make_shared<IdealRules>(); }

std::uint64_t ideal_closure_budget(const Poly& p, std::uint64_t h) {
  Natural b = multiple_rule_index(p, unrank(count_upto(h) - 1)) + 1;
  return small_index(b);
}

// ---------------------------------------------------------------------------

bool principal_membership(const Poly& p, const Poly& q) {
  if (p.is_zero()) throw Error("the divisor must be nonzero");
  return divmod(q, p).remainder.is_zero();
}

namespace {

std::vector<Natural> divisors(Natural n) {
  n = abs(n);
  std::vector<Natural> out;
  for (Natural d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  return out;
}

Rational evaluate(const Poly& p, const Rational& x) {
  Rational acc = 0;
  const auto& c = p.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

}  // namespace

std::optional<Rational> rational_root(const Poly& p) {
  if (p.is_zero()) return Rational(0);
  const auto& c = p.coeffs();
  if (c[0] == 0) return Rational(0);
  if (p.degree() == 0) return std::nullopt;
  Natural l = 1;
  for (const auto& x : c) l = mp::lcm(l, Natural(mp::denominator(x)));
  Natural a0 = mp::numerator(Rational(c.front() * l)), an = mp::numerator(Rational(c.back() * l));
  for (const auto& d : divisors(a0))
    for (const auto& e : divisors(an))
      for (int sign : {1, -1}) {
        Rational x(Natural(sign * d), e);
        if (evaluate(p, x) == 0) return x;
      }
  return std::nullopt;
}

void check_irreducible(const Poly& p) {
  if (p.degree() < 1) throw Error("reducible: " + format_poly(p) + " is a constant");
  if (p.degree() > 3) return;
  if (auto r = rational_root(p))
    throw Error("reducible: " + format_poly(p) + " has the rational root " + format_rational(*r));
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kDefaultPairs = 64;

class IdealOperator final : public EnumerationOperator {
 public:
  IdealOperator() : stream_(ideal_rules()) {}

  OperatorValue eval(AtomId x, const Natural& n) const override {
    return derivation_decode(*stream_, x, n);
  }

  std::vector<std::optional<Natural>> find_witnesses(
      std::span<const AtomId> goals, const AtomSet& base,
      std::span<const AtomId> extra, std::uint64_t effort) const override {
    const std::uint64_t pairs = effort == 0 ? kDefaultPairs : effort;
    std::vector<AtomId> avail(extra.begin(), extra.end());
    for (const auto& b : base) {
      if (avail.size() >= pairs + extra.size()) break;
      avail.push_back(b);
    }
    std::vector<std::optional<Natural>> out;
    for (const auto& goal : goals) out.push_back(witness(goal, avail, base, extra, pairs));
    return out;
  }

 private:
  std::optional<Natural> witness(const AtomId& goal, const std::vector<AtomId>& avail,
                                 const AtomSet& base, std::span<const AtomId> extra,
                                 std::uint64_t pairs) const {
    if (base.count(goal) || std::find(extra.begin(), extra.end(), goal) != extra.end())
      return Natural(0);
    const Poly g = poly_of(goal);
    auto accept = [&](const std::vector<RuleIndex>& seq) -> std::optional<Natural> {
      Natural n = codec::seq_encode(seq);
      if (value_within(eval(goal, n), base, extra)) return n;
      return std::nullopt;
    };
    std::uint64_t tried = 0;
    for (std::size_t i = 0; i < avail.size(); ++i) {
      const Poly x = poly_of(avail[i]);
      if (x.is_zero()) continue;
      if (auto dm = divmod(g, x); dm.remainder.is_zero())
        if (auto n = accept({multiple_rule_index(x, dm.quotient)})) return n;
      for (std::size_t j = i + 1; j < avail.size(); ++j) {
        if (++tried > pairs) return std::nullopt;
        const Poly b = poly_of(avail[j]);
        if (b.is_zero()) continue;
        auto bz = extended_gcd(x, b);
        auto dm = divmod(g, bz.g);
        if (!dm.remainder.is_zero()) continue;
        const Poly fu = dm.quotient * bz.u, fv = dm.quotient * bz.v;
        if (auto n = accept({multiple_rule_index(x, fu), multiple_rule_index(b, fv),
                             sum_rule_index(fu * x, fv * b)}))
          return n;
      }
    }
    return std::nullopt;
  }

  RuleStreamPtr stream_;
};

}  // namespace

OperatorPtr ideal_operator() { return std::make_shared<IdealOperator>(); }

DemoReport maximal_ideal_demo(const Poly& p, std::uint64_t budget, std::uint64_t max_height) {
  check_irreducible(p);
  DemoReport rep;
  rep.p = p;
  rep.budget = budget;
  rep.max_height = max_height;

  auto stream = ideal_rules();
  auto cl = closure(AtomSet{atom_of(p)}, *stream, budget);
  const AtomSet& x_set = cl.derived.members();
  rep.enumerated = x_set.size();
  for (const auto& a : x_set)
    if (!principal_membership(p, poly_of(a))) ++rep.emitted_nonmembers;

  auto g = complement_op_maximal(ideal_operator(), atom_of(Poly::constant(1)));
  for (const auto& q : polys_upto(max_height)) {
    ++rep.checked;
    const bool member = principal_membership(p, q);
    if (member) ++rep.members;
    AtomId x = atom_of(q);
    auto w = g->find_witness(x, x_set, kDefaultPairs);
    const bool certified = w && value_within(g->eval(x, *w), x_set);
    if (certified) rep.certified.push_back(q);
    if (certified && member) rep.unsound.push_back(q);
    if (!certified && !member) rep.missed.push_back(q);
  }
  return rep;
}

}  // namespace qv::ideal
