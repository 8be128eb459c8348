#pragma once

#include <string>
#include <vector>

namespace smdkit::checks {

/* One acceptance criterion: a self-contained experiment with a hard
 * pass/fail verdict. detail carries the measured numbers either way, so a
 * failing line names the quantity that broke. */
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;         /* measured wall time */
  double budget_seconds = 0.0;  /* exceeding it fails the criterion */
  std::string detail;
};

inline constexpr int kCheckCount = 11;

/* network_dir: directory holding the shipped instances (two-route.json,
 * pigou.json, braess.json, grid3x3.json); only the traffic criteria read it.
 * Valid ids are 1..kCheckCount; anything else throws std::invalid_argument. */
CheckResult run_check(int id, const std::string& network_dir);
std::vector<CheckResult> run_all_checks(const std::string& network_dir);

/* Compiled-in default for network_dir (the source-tree data directory). */
const char* default_network_dir();

}  // namespace smdkit::checks
