// Line-oriented reader shared by the instance file parsers.

#ifndef QV_TEXT_HPP_
#define QV_TEXT_HPP_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace qv::text {

/// Splits lines into whitespace separated tokens, skipping blank lines and
/// '#' comments. line() is the 1-based number of the last line returned.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens);
  /// First significant line; ParseError when the input has none.
  std::vector<std::string> next_header();
  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

std::vector<std::string> split_ws(const std::string& s);
std::uint64_t parse_u64(const std::string& tok, int line);

}  // namespace qv::text

#endif  // QV_TEXT_HPP_
