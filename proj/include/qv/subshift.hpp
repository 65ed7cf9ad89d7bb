// Subshifts over a finite alphabet: the universe is the set of finite words,
// points are forbidden languages.
//
// Universe codec: length-lexicographic rank. With s letters the words of
// length l start at rank (s^l - 1) / (s - 1) (rank l when s = 1).

#ifndef QV_SUBSHIFT_HPP_
#define QV_SUBSHIFT_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qv/engine.hpp"
#include "qv/operators.hpp"
#include "qv/types.hpp"

namespace qv::subshift {

using Word = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxOracleLength = 16;

class Alphabet {
 public:
  /// Distinct printable letters; '-' is reserved for the empty word.
  explicit Alphabet(std::string letters);
  static Alphabet standard(std::size_t size);  // "ab...", size <= 26

  std::size_t size() const { return letters_.size(); }
  const std::string& letters() const { return letters_; }

  /// "-" parses to the empty word. Throws ParseError on unknown letters.
  Word parse(const std::string& text) const;
  std::string format(const Word& w) const;

 private:
  std::string letters_;
};

/// Number of words of length <= len; RangeError on overflow.
std::uint64_t count_upto(std::size_t s, std::size_t len);
std::optional<std::uint64_t> rank(const Word& w, std::size_t s);
Word unrank(std::uint64_t i, std::size_t s);
AtomId atom_of(const Word& w, std::size_t s);  // RangeError when rank overflows
Word word_of(AtomId a, std::size_t s);

bool contains_factor(const Word& w, const Word& factor);

/// Words of length exactly n, in lexicographic order.
std::vector<Word> words_of_length(std::size_t s, std::size_t n);
std::vector<Word> words_upto(std::size_t s, std::size_t n);

/// Index i decodes as w = unrank(i / (2s + 2)), r = i mod (2s + 2):
///   r < s        {w} => a_r w
///   r < 2s       {w} => w a_(r-s)
///   r = 2s       {w a : a} => w
///   r = 2s + 1   {a w : a} => w
/// Local witness searches stay among words of length <= radius.
RuleStreamPtr subshift_rules(std::size_t s);

/// Stream index of the rule of family r for the word w.
std::optional<RuleIndex> rule_index(const Word& w, std::size_t r, std::size_t s);

struct SftPresentation {
  Alphabet alphabet;
  std::vector<Word> forbidden;
};

std::size_t max_forbidden_length(const SftPresentation& p);

/// Admissible words of length <= L in length-lex order (empty for the empty
/// subshift). GuardError when L > 16.
std::vector<Word> sft_language_oracle(const SftPresentation& p, std::size_t L);

/// Words of length <= L that are not admissible.
std::vector<Word> sft_forbidden_oracle(const SftPresentation& p, std::size_t L);

/// One periodic orbit: the trimmed de Bruijn graph is a single cycle.
bool is_minimal_sft(const SftPresentation& p);

/// Longest word a derivation of a forbidden word of length <= L needs:
/// L + (m - 1) + s^(m - 1), m the longest forbidden length (at least 1).
std::uint64_t sft_derivation_length(std::size_t s, std::size_t m, std::size_t L);

/// Rule budget covering every word shorter than sft_derivation_length:
/// (2s + 2) * count_upto(s, len - 1).
std::uint64_t sft_closure_budget(std::size_t s, std::size_t m, std::size_t L);

/// Admissible words of a given exact length.
using Language = std::function<std::vector<Word>(std::size_t)>;

Language sft_language(const SftPresentation& p);

/// Least N <= cap such that every admissible N-word has every admissible
/// n-word as a factor; nullopt when no N <= cap works. Error if the
/// language has no n-words.
std::optional<std::size_t> quasiperiodicity(const Language& lang, std::size_t n, std::size_t cap);

/// A substitution on letters, images indexed by letter.
class SubstitutionShift {
 public:
  /// Error unless the incidence matrix is primitive and some image has
  /// length >= 2.
  SubstitutionShift(Alphabet alphabet, std::vector<Word> images);
  static SubstitutionShift fibonacci();  // a -> ab, b -> a

  const Alphabet& alphabet() const { return alphabet_; }
  Word iterate(std::size_t k, std::uint8_t letter = 0) const;

  /// Factors of length n of the subshift, lexicographic.
  std::vector<Word> admissible(std::size_t n) const;
  Language language() const;

  /// Non-admissible words of length <= L in length-lex order.
  AtomEnumeration forbidden_upto(std::size_t L) const;

 private:
  Word apply(const Word& w) const;

  Alphabet alphabet_;
  std::vector<Word> images_;
  std::vector<Word> two_words_;  // admissible words of length 2
};

/// f(x, n) = the words of length n without x as a factor. For a minimal
/// subshift with forbidden language X this realises complement(X) <=_e X.
/// Bottom for n > 20.
OperatorPtr recurrence_operator(std::size_t s);

/// Header `universe subshift <letters>`, lines `forbid <word>`.
SftPresentation parse_sft_file(std::istream& in);

}  // namespace qv::subshift

#endif  // QV_SUBSHIFT_HPP_
