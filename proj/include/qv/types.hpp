// Core value types shared by every quasivariety instance.

#ifndef QV_TYPES_HPP_
#define QV_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qv {

// Operator indices grow without bound (derivation codes), so they are
// arbitrary precision.
using Natural = boost::multiprecision::cpp_int;

/// Stream positions of rules; pairing codes make them large.
using RuleIndex = Natural;

/// Position of an element of the universe I in its instance enumeration.
struct AtomId {
  Natural index;

  AtomId() = default;
  explicit AtomId(std::uint64_t i) : index(i) {}
  explicit AtomId(Natural i) : index(std::move(i)) {}

  friend bool operator==(const AtomId&, const AtomId&) = default;
  friend std::strong_ordering operator<=>(const AtomId& a, const AtomId& b) {
    int c = a.index.compare(b.index);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
};

/// The index as a u64; RangeError when it does not fit.
std::uint64_t small_index(const AtomId& a);
std::uint64_t small_index(const Natural& n);

using AtomSet = std::set<AtomId>;

AtomSet make_atom_set(std::initializer_list<std::uint64_t> indices);

bool is_subset(const AtomSet& small, const AtomSet& big);

/// premises => conclusion. Premises are kept sorted and deduplicated.
struct HornRule {
  std::vector<AtomId> premises;
  AtomId conclusion;

  HornRule() = default;
  HornRule(std::vector<AtomId> prem, AtomId concl);

  friend bool operator==(const HornRule&, const HornRule&) = default;
  friend auto operator<=>(const HornRule& a, const HornRule& b) {
    if (auto c = a.premises <=> b.premises; c != 0) return c;
    return a.conclusion <=> b.conclusion;
  }
};

/// Malformed input, bad arguments, violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive oracle was asked for a universe larger than its guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Input text that does not follow a file or literal grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// An atom or index exceeds what a codec or oracle can represent.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace qv

template <>
struct std::hash<qv::AtomId> {
  std::size_t operator()(const qv::AtomId& a) const noexcept {
    return boost::multiprecision::hash_value(a.index);
  }
};

#endif  // QV_TYPES_HPP_
