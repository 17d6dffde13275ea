#include <cstdio>
#include <cstdlib>

#include "freeconv/acceptance.hpp"

int main() {
  freeconv::AcceptanceConfig cfg;
  if (const char* s = std::getenv("FREECONV_SEED")) cfg.seed = std::strtoull(s, nullptr, 10);
  int failed = 0;
  freeconv::run_acceptance(cfg, [&](const freeconv::CriterionResult& c) {
    std::printf("[%s] %s: %s (%.2f s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str(), c.seconds);
    std::fflush(stdout);
    if (!c.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
