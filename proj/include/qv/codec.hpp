// Bijective codes between natural numbers and pairs, tuples and sequences.
//
// Pairs use the Cantor pairing pi(a, b) = (a + b)(a + b + 1) / 2 + b.
// A k-tuple (k >= 2) is right-nested: (x1, pi(x2, ... pi(x_{k-1}, x_k))).
// Finite sequences of any length use a size-linear code (see seq_encode),
// because nested pairing doubles the bit length at every element.

#ifndef QV_CODEC_HPP_
#define QV_CODEC_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qv/types.hpp"

namespace qv::codec {

Natural pair(const Natural& a, const Natural& b);
std::pair<Natural, Natural> unpair(const Natural& n);

/// 64-bit variants; pair64 throws RangeError on overflow.
std::uint64_t pair64(std::uint64_t a, std::uint64_t b);
std::pair<std::uint64_t, std::uint64_t> unpair64(std::uint64_t n);
/// pi(a, b) only if it fits in 64 bits.
std::optional<std::uint64_t> try_pair64(std::uint64_t a, std::uint64_t b);

/// Bijection N^k <-> N for fixed k >= 1 (k = 1 is the identity).
Natural tuple_encode(const std::vector<Natural>& xs);
std::vector<Natural> tuple_decode(const Natural& n, std::size_t k);

/// Bijection N* <-> N. The empty sequence is 0. A nonempty sequence
/// (k1, ..., km) is written as the string B(k1) 0 B(k2) 0 ... 0 B(km) over
/// the digits {0, 1, 2}, where B(k) is the bijective base-2 numeral of k in
/// digits {1, 2} (B(0) is empty). The string is then read as a bijective
/// base-3 numeral with digit d worth d + 1, and the code is 1 + that value.
Natural seq_encode(const std::vector<Natural>& xs);
std::vector<Natural> seq_decode(const Natural& n);

/// Convenience for sequences of machine-sized values. Decoding returns
/// nullopt if an element exceeds 64 bits.
Natural seq_encode64(const std::vector<std::uint64_t>& xs);
std::optional<std::vector<std::uint64_t>> seq_decode64(const Natural& n);

std::optional<std::uint64_t> to_u64(const Natural& n);

}  // namespace qv::codec

#endif  // QV_CODEC_HPP_
