// Acceptance gate: runs the twelve numbered verification criteria at full
// budget with the published seed and prints one PASS/FAIL line each.
// Exits nonzero when any criterion fails.
//
// Environment overrides (debugging only):
//   SLELAB_ACCEPT_BUDGET  scale all sample counts (default 1.0)
//   SLELAB_ACCEPT_ONLY    comma-separated criterion ids (default all)

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <slelab/verify.hpp>

int main() {
  slelab::VerifyOptions opt;
  if (const char* b = std::getenv("SLELAB_ACCEPT_BUDGET"))
    opt.budget = std::atof(b);
  std::vector<int> ids;
  if (const char* o = std::getenv("SLELAB_ACCEPT_ONLY")) {
    std::string s(o);
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find(',', pos);
      if (next == std::string::npos) next = s.size();
      ids.push_back(std::atoi(s.substr(pos, next - pos).c_str()));
      pos = next + 1;
    }
  }
  if (ids.empty())
    for (int i = 1; i <= 12; ++i) ids.push_back(i);

  int failures = 0;
  double total = 0;
  for (int id : ids) {
    const auto results = slelab::run_criteria(opt, {id});
    for (const auto& r : results) {
      std::printf("[%s] %2d %-28s %9.2fs  %s\n", r.pass ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.seconds, r.detail.c_str());
      std::fflush(stdout);
      if (!r.pass) ++failures;
      total += r.seconds;
    }
  }
  std::printf("%d/%zu criteria passed (%.1f s total)\n",
              static_cast<int>(ids.size()) - failures, ids.size(), total);
  return failures == 0 ? 0 : 1;
}
