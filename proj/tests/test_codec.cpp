#include <random>
#include <string>

#include "doctest.h"
#include "qv/codec.hpp"

using namespace qv;
using codec::pair;
using codec::unpair;

namespace {

// Direct transcription of the sequence code, for cross-checking.
Natural reference_seq_encode(const std::vector<std::uint64_t>& xs) {
  if (xs.empty()) return 0;
  std::string digits;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) digits += '0';
    std::string b;
    for (std::uint64_t k = xs[i]; k > 0;) {
      std::uint64_t d = (k - 1) % 2 + 1;
      b.insert(b.begin(), char('0' + d));
      k = (k - d) / 2;
    }
    digits += b;
  }
  Natural v = 0;
  for (char c : digits) v = v * 3 + (c - '0' + 1);
  return v + 1;
}

}  // namespace

TEST_CASE("Cantor pairing values") {
  CHECK(pair(0, 0) == 0);
  CHECK(pair(1, 0) == 1);
  CHECK(pair(0, 1) == 2);
  CHECK(pair(2, 3) == 18);
  CHECK(unpair(18) == std::pair<Natural, Natural>(2, 3));
}

TEST_CASE("pairing is a bijection on the first 10^4 codes") {
  for (std::uint64_t n = 0; n < 10000; ++n) {
    auto [a, b] = unpair(n);
    REQUIRE(pair(a, b) == n);
    auto [x, y] = codec::unpair64(n);
    REQUIRE(codec::pair64(x, y) == n);
  }
  for (std::uint64_t a = 0; a < 100; ++a)
    for (std::uint64_t b = 0; b < 100; ++b) REQUIRE(unpair(pair(a, b)) == std::pair<Natural, Natural>(a, b));
}

TEST_CASE("64-bit pairing overflow") {
  CHECK_THROWS_AS(codec::pair64(std::uint64_t{1} << 33, std::uint64_t{1} << 33), RangeError);
  CHECK_FALSE(codec::try_pair64(std::uint64_t{1} << 33, std::uint64_t{1} << 33));
  CHECK(codec::try_pair64(2, 3) == std::optional<std::uint64_t>(18));
}

TEST_CASE("tuples nest to the right") {
  CHECK(codec::tuple_encode({7}) == 7);
  CHECK(codec::tuple_encode({2, 3}) == pair(2, 3));
  CHECK(codec::tuple_encode({1, 2, 3}) == pair(1, pair(2, 3)));
  for (std::uint64_t n = 0; n < 10000; ++n)
    for (std::size_t k = 1; k <= 4; ++k) REQUIRE(codec::tuple_encode(codec::tuple_decode(n, k)) == n);
}

TEST_CASE("sequence code values") {
  CHECK(codec::seq_encode({}) == 0);
  CHECK(codec::seq_encode({0}) == 1);
  CHECK(codec::seq_encode({0, 0}) == 2);
  CHECK(codec::seq_encode({1}) == 3);
  CHECK(codec::seq_decode(0).empty());
}

TEST_CASE("sequence code is a bijection on the first 10^4 codes") {
  for (std::uint64_t n = 0; n < 10000; ++n) REQUIRE(codec::seq_encode(codec::seq_decode(n)) == n);
}

TEST_CASE("sequence code matches its definition on random sequences") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10000; ++t) {
    std::vector<std::uint64_t> xs(rng() % 6);
    for (auto& x : xs) x = rng() % (t % 2 ? 1000 : 5);
    Natural code = codec::seq_encode64(xs);
    REQUIRE(code == reference_seq_encode(xs));
    REQUIRE(codec::seq_decode64(code) == std::optional(xs));
  }
}

TEST_CASE("sequence code length is linear in the element sizes") {
  std::vector<Natural> xs(64, Natural(1000));
  CHECK(msb(codec::seq_encode(xs)) < 64 * 12 * 2);
}
