#include "qv/text.hpp"

#include <charconv>
#include <sstream>

#include "qv/types.hpp"

namespace qv::text {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool LineReader::next(std::vector<std::string>& tokens) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    tokens = split_ws(raw);
    if (!tokens.empty()) return true;
  }
  return false;
}

std::vector<std::string> LineReader::next_header() {
  std::vector<std::string> toks;
  if (!next(toks)) throw ParseError("missing 'universe' header", line_ + 1);
  return toks;
}

std::uint64_t parse_u64(const std::string& tok, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  return v;
}

}  // namespace qv::text
