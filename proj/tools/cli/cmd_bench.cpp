#include <cstdio>
#include <string>
#include <vector>

#include "checks.hpp"
#include "commands.hpp"
#include "emit.hpp"

namespace smdkit::cli {
namespace {

struct BenchOpts {
  std::vector<int> only;
  std::string network_dir;
  std::string json_path;
};

void run(const BenchOpts& o) {
  std::string dir = o.network_dir.empty() ? checks::default_network_dir()
                                          : o.network_dir;
  std::vector<int> ids(o.only);
  if (ids.empty()) {
    for (int i = 1; i <= checks::kCheckCount; ++i) ids.push_back(i);
  }
  for (int id : ids) {
    if (id < 1 || id > checks::kCheckCount) {
      throw ConfigError("invalid config: --only ids must lie in 1.." +
                        std::to_string(checks::kCheckCount));
    }
  }

  int failed = 0;
  double total = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  std::printf("acceptance suite (network dir: %s)\n", dir.c_str());
  for (int id : ids) {
    checks::CheckResult r = checks::run_check(id, dir);
    total += r.seconds;
    if (!r.passed) ++failed;
    std::printf("[%2d] %s  %-24s %7.2fs  %s\n", r.id,
                r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"passed", r.passed},
                    {"seconds", r.seconds},
                    {"budget_seconds", r.budget_seconds},
                    {"detail", r.detail}});
  }
  std::printf("%zu/%zu criteria passed (%.1fs)\n", ids.size() - failed,
              ids.size(), total);

  if (!o.json_path.empty()) {
    write_json(o.json_path, {{"network_dir", dir},
                             {"results", rows},
                             {"failed", failed}});
    std::printf("wrote %s\n", o.json_path.c_str());
  }
  if (failed > 0) throw CheckFailure{failed};
}

}  // namespace

void register_bench(CLI::App& app) {
  auto opts = std::make_shared<BenchOpts>();
  CLI::App* cmd = app.add_subcommand(
      "bench", "run the acceptance suite and print a pass/fail table");
  auto cfg = attach_common(*cmd);
  cmd->add_option("--only", opts->only,
                  "comma-separated criteria ids to run (default: all)")
      ->delimiter(',');
  cmd->add_option("--network-dir", opts->network_dir,
                  "directory holding the shipped network instances");
  cmd->add_option("--json", opts->json_path,
                  "also write the results as JSON to this path");
  cmd->callback([cmd, cfg, opts] {
    apply_json_config(*cmd, *cfg);
    run(*opts);
  });
}

}  // namespace smdkit::cli
