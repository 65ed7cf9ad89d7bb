// Oracle-backed verification suites, one per theorem. Shared by the
// `verify` command and the acceptance binary.

#ifndef QV_VERIFY_HPP_
#define QV_VERIFY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qv::verify {

struct SuiteReport {
  std::string name;
  std::uint64_t checks = 0;
  std::uint64_t failure_count = 0;
  std::vector<std::string> failures;  // first few messages
  std::vector<std::string> notes;     // parameters and counts
  double seconds = 0;

  bool passed() const { return failure_count == 0; }
};

struct SuiteOptions {
  std::uint64_t seed = 0;
};

/// Suite names in criterion order.
const std::vector<std::string>& suite_names();

/// nullopt for an unknown name.
std::optional<SuiteReport> run_suite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace qv::verify

#endif  // QV_VERIFY_HPP_
