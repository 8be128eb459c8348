/* Runs every acceptance criterion and prints one verdict line per criterion.
 * Exit status is the number of failed criteria (0 = all passed). */

#include <cstdio>
#include <string>

#include "checks.hpp"

int main(int argc, char** argv) {
  std::string dir = smdkit::checks::default_network_dir();
  if (argc > 1) dir = argv[1];

  int failed = 0;
  double total = 0.0;
  std::printf("acceptance suite (network dir: %s)\n", dir.c_str());
  for (const auto& r : smdkit::checks::run_all_checks(dir)) {
    total += r.seconds;
    if (!r.passed) ++failed;
    std::printf("[%2d] %s  %-24s %7.2fs  %s\n", r.id, r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed (%.1fs)\n", smdkit::checks::kCheckCount - failed,
              smdkit::checks::kCheckCount, total);
  return failed;
}
