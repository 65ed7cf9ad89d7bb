// One line per acceptance criterion. Exit status 0 iff every criterion passes.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "qv/verify.hpp"

namespace {

struct Criterion {
  int id;
  const char* suite;
  double seconds_limit;  // 0 = no time bound
};

// Wall-clock limits per criterion.
const std::vector<Criterion> kCriteria = {
    {1, "closure-laws", 10.0},      {2, "presentation", 60.0},
    {3, "converse-presentation", 0}, {4, "maximal-complement", 0},
    {5, "below-family", 0},          {6, "converse-maximality", 0},
    {7, "discriminator", 0},         {8, "simple-group", 300.0},
    {9, "minimal-subshift", 0},      {10, "g-map", 0},
    {11, "pi01", 60.0},              {12, "ideal-demo", 0},
};

}  // namespace

int main(int argc, char** argv) {
  qv::verify::SuiteOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  for (const auto& c : kCriteria) {
    auto rep = qv::verify::run_suite(c.suite, opts);
    bool in_time = c.seconds_limit == 0 || rep->seconds < c.seconds_limit;
    bool ok = rep->passed() && in_time;
    if (!ok) ++failed;
    std::string limit = c.seconds_limit > 0 ? " (limit " + std::to_string(int(c.seconds_limit)) + " s)" : "";
    std::printf("criterion %2d %-22s %s  checks %llu failures %llu  %.2f s%s\n", c.id, c.suite,
                ok ? "PASS" : "FAIL", static_cast<unsigned long long>(rep->checks),
                static_cast<unsigned long long>(rep->failure_count), rep->seconds, limit.c_str());
    for (const auto& n : rep->notes) std::printf("    %s\n", n.c_str());
    for (const auto& f : rep->failures) std::printf("    failure: %s\n", f.c_str());
    if (!in_time) std::printf("    failure: exceeded the time limit\n");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(kCriteria.size()) - failed,
              kCriteria.size());
  return failed == 0 ? 0 : 1;
}
