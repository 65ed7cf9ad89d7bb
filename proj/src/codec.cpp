#include "qv/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qv {

AtomSet make_atom_set(std::initializer_list<std::uint64_t> indices) {
  AtomSet out;
  for (auto i : indices) out.insert(AtomId{i});
  return out;
}

std::uint64_t small_index(const Natural& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max())
    throw RangeError("index does not fit 64 bits");
  return static_cast<std::uint64_t>(n);
}

std::uint64_t small_index(const AtomId& a) { return small_index(a.index); }

bool is_subset(const AtomSet& small, const AtomSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

HornRule::HornRule(std::vector<AtomId> prem, AtomId concl)
    : premises(std::move(prem)), conclusion(std::move(concl)) {
  std::sort(premises.begin(), premises.end());
  premises.erase(std::unique(premises.begin(), premises.end()), premises.end());
}

namespace codec {

Natural pair(const Natural& a, const Natural& b) {
  Natural s = a + b;
  return s * (s + 1) / 2 + b;
}

std::pair<Natural, Natural> unpair(const Natural& n) {
  // w = floor((sqrt(8n + 1) - 1) / 2)
  Natural m = 8 * n + 1;
  Natural w = (boost::multiprecision::sqrt(m) - 1) / 2;
  Natural t = w * (w + 1) / 2;
  Natural b = n - t;
  return {w - b, b};
}

std::optional<std::uint64_t> try_pair64(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
  unsigned __int128 v = s * (s + 1) / 2 + b;
  if (v > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

std::uint64_t pair64(std::uint64_t a, std::uint64_t b) {
  auto v = try_pair64(a, b);
  if (!v) throw RangeError("pair code exceeds 64 bits");
  return *v;
}

std::pair<std::uint64_t, std::uint64_t> unpair64(std::uint64_t n) {
  // Integer sqrt with correction; 8n + 1 fits in 128 bits.
  unsigned __int128 m = static_cast<unsigned __int128>(n) * 8 + 1;
  auto r = static_cast<unsigned __int128>(
      std::sqrt(static_cast<long double>(m)));
  while (r * r > m) --r;
  while ((r + 1) * (r + 1) <= m) ++r;
  unsigned __int128 w = (r - 1) / 2;
  unsigned __int128 t = w * (w + 1) / 2;
  auto b = static_cast<std::uint64_t>(n - t);
  return {static_cast<std::uint64_t>(w - b), b};
}

Natural tuple_encode(const std::vector<Natural>& xs) {
  if (xs.empty()) throw Error("tuple_encode: arity must be at least 1");
  Natural acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) acc = pair(xs[i], acc);
  return acc;
}

std::vector<Natural> tuple_decode(const Natural& n, std::size_t k) {
  if (k == 0) throw Error("tuple_decode: arity must be at least 1");
  std::vector<Natural> out;
  out.reserve(k);
  Natural rest = n;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    auto [head, tail] = unpair(rest);
    out.push_back(std::move(head));
    rest = std::move(tail);
  }
  out.push_back(std::move(rest));
  return out;
}

namespace {

// Bijective base-2 numeral, most significant digit first, digits '1'/'2'.
void append_bijective2(Natural k, std::string& out) {
  std::string digits;
  while (k > 0) {
    if ((k & 1) == 1) {
      digits.push_back('1');
      k = (k - 1) / 2;
    } else {
      digits.push_back('2');
      k = k / 2 - 1;
    }
  }
  out.append(digits.rbegin(), digits.rend());
}

Natural read_bijective2(const std::string& s, std::size_t begin, std::size_t end) {
  Natural k = 0;
  for (std::size_t i = begin; i < end; ++i) k = k * 2 + (s[i] - '0');
  return k;
}

}  // namespace

Natural seq_encode(const std::vector<Natural>& xs) {
  if (xs.empty()) return 0;
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) s.push_back('0');
    append_bijective2(xs[i], s);
  }
  Natural v = 0;
  for (char c : s) v = v * 3 + (c - '0' + 1);
  return v + 1;
}

std::vector<Natural> seq_decode(const Natural& n) {
  if (n == 0) return {};
  Natural v = n - 1;
  std::string s;
  while (v > 0) {
    // digit d in {1,2,3}: v = 3q + d
    Natural r = v % 3;
    int d = r == 0 ? 3 : static_cast<int>(r);
    s.push_back(static_cast<char>('0' + d - 1));
    v = (v - d) / 3;
  }
  std::reverse(s.begin(), s.end());
  std::vector<Natural> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '0') {
      out.push_back(read_bijective2(s, start, i));
      start = i + 1;
    }
  }
  return out;
}

Natural seq_encode64(const std::vector<std::uint64_t>& xs) {
  std::vector<Natural> big(xs.begin(), xs.end());
  return seq_encode(big);
}

std::optional<std::uint64_t> to_u64(const Natural& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(n);
}

std::optional<std::vector<std::uint64_t>> seq_decode64(const Natural& n) {
  std::vector<std::uint64_t> out;
  for (const auto& x : seq_decode(n)) {
    auto v = to_u64(x);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

}  // namespace codec
}  // namespace qv
