#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "commands.hpp"
#include "emit.hpp"
#include "smdkit/online.hpp"

namespace smdkit::cli {
namespace {

struct OnlineOpts {
  std::string policy = "majority";
  std::vector<int> script;
  long N = 10000;
  std::string mode = "expected";
  int seeds = 1;
  std::uint64_t seed = 0;
  long trace_stride = 0;           /* 0 = N/100 */
  std::string out;
  std::string tag;
};

void run(const OnlineOpts& o) {
  if (o.N < 0) {
    throw ConfigError("invalid config: --N must be nonnegative (got " +
                      std::to_string(o.N) + ")");
  }
  if (o.seeds < 1) throw ConfigError("invalid config: --seeds must be at least 1");
  CasinoPolicy policy;
  if (o.policy == "scripted") policy = CasinoPolicy::scripted;
  else if (o.policy == "majority") policy = CasinoPolicy::majority;
  else if (o.policy == "coin") policy = CasinoPolicy::coin;
  else {
    throw ConfigError("invalid config: --policy must be scripted, majority, "
                      "or coin (got " + o.policy + ")");
  }
  for (int v : o.script) {
    if (v != 1 && v != -1) {
      throw ConfigError("invalid config: --script entries must be 1 or -1");
    }
  }
  if (!o.script.empty() && policy != CasinoPolicy::scripted) {
    throw ConfigError("invalid config: --script applies to --policy scripted");
  }
  PlayMode mode;
  if (o.mode == "expected") mode = PlayMode::expected;
  else if (o.mode == "sampled") mode = PlayMode::sampled;
  else throw ConfigError("invalid config: --mode must be expected or sampled");

  const double M = 1.0;
  const double ln2 = std::log(2.0);
  std::string tag = !o.tag.empty() ? o.tag : "casino-" + o.policy + "-" + o.mode;
  auto dir = resolve_out_dir(o.out);
  long stride = o.trace_stride > 0 ? o.trace_stride : auto_stride(o.N);

  nlohmann::json per_seed = nlohmann::json::array();
  double regret_sum = 0.0;
  for (int i = 0; i < o.seeds; ++i) {
    std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
    CasinoStream stream(policy, o.script);
    RegretRecord rec = run_exp_weights(stream, 2, o.N, M, mode, seed);

    auto file = dir / (tag + "-seed" + std::to_string(seed) + ".csv");
    CsvFile csv(
        file,
        {"loss_0/loss_1: losses of betting on +1/-1; play_0: weight on +1 "
         "before the round; bet: sampled action (0 bets +1)",
         "avg_regret: (1/k)*sum paid - min_i (1/k)*sum l_i over the first k "
         "rounds",
         "bound: ln(2)/(k*h) + h*M^2/2 with the horizon step "
         "h = sqrt(2 ln 2 / N)/M; equals M*sqrt(2 ln 2 / N) at k = N"},
        {"experiment", "seed", "step", "loss_0", "loss_1", "play_0", "bet",
         "avg_regret", "bound"});
    if (o.N > 0) {
      const double h = std::sqrt(2.0 * ln2 / static_cast<double>(o.N)) / M;
      for (long k = 1; k <= o.N; ++k) {
        if (k % stride != 0 && k != o.N) continue;
        std::size_t r = static_cast<std::size_t>(k - 1);
        double bound = ln2 / (static_cast<double>(k) * h) + h * M * M / 2.0;
        csv.row({tag, std::to_string(seed), std::to_string(k),
                 num(rec.losses[r][0]), num(rec.losses[r][1]),
                 num(rec.plays[r][0]), std::to_string(rec.bets[r]),
                 num(rec.regret_trace[r]), num(bound)});
      }
    }
    std::printf("wrote %s\n", file.string().c_str());

    nlohmann::json entry = {{"seed", seed}, {"rounds", rec.rounds}};
    if (rec.final_regret) {
      entry["final_regret"] = *rec.final_regret;
      entry["win_frequency"] = win_frequency(rec);
      regret_sum += *rec.final_regret;
      std::printf("seed %llu: regret %s (bound %s), win frequency %s\n",
                  static_cast<unsigned long long>(seed),
                  num(*rec.final_regret).c_str(), num(rec.bound).c_str(),
                  num(win_frequency(rec)).c_str());
    } else {
      entry["final_regret"] = nullptr;  /* empty game, regret undefined */
      std::printf("seed %llu: empty game (N=0), regret undefined\n",
                  static_cast<unsigned long long>(seed));
    }
    per_seed.push_back(std::move(entry));
  }

  double bound = o.N > 0 ? M * std::sqrt(2.0 * ln2 / static_cast<double>(o.N))
                         : 0.0;
  nlohmann::json summary = {{"experiment", tag}, {"policy", o.policy},
                            {"mode", o.mode},   {"N", o.N},
                            {"seeds", o.seeds}, {"per_seed", per_seed}};
  if (o.N > 0) {
    summary["bound"] = bound;
    summary["mean_final_regret"] = regret_sum / o.seeds;
    summary["mean_within_bound"] = regret_sum / o.seeds <= bound;
  }
  auto spath = dir / (tag + "-summary.json");
  write_json(spath, summary);
  std::printf("wrote %s\n", spath.string().c_str());
}

}  // namespace

void register_online(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand(
      "online", "online linear play on the simplex against an adversary");
  cmd->set_help_flag("--help", "print this help and exit");
  cmd->require_subcommand(1);

  auto opts = std::make_shared<OnlineOpts>();
  CLI::App* casino = cmd->add_subcommand(
      "casino", "coin-guessing game against the exp-weights learner");
  auto cfg = attach_common(*casino);
  casino->add_option("--policy", opts->policy,
                     "scripted (replay --script), majority (counter the "
                     "learner's modal bet), or coin (fair i.i.d.)")
      ->check(CLI::IsMember({"scripted", "majority", "coin"}));
  casino->add_option("--script", opts->script,
                     "comma-separated +/-1 outcomes, replayed cyclically "
                     "(empty = constant +1)")
      ->delimiter(',');
  casino->add_option("--N", opts->N, "number of rounds");
  casino->add_option("--mode", opts->mode,
                     "expected (play the distribution) or sampled (play one "
                     "sampled bet)")
      ->check(CLI::IsMember({"expected", "sampled"}));
  casino->add_option("--seeds", opts->seeds,
                     "number of consecutive seeds to run");
  casino->add_option("--seed", opts->seed, "first seed");
  casino->add_option("--trace-stride", opts->trace_stride,
                     "rounds between trace rows (default N/100)");
  casino->add_option("--out", opts->out,
                     "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
  casino->add_option("--tag", opts->tag, "experiment id used in file names");
  casino->callback([casino, cfg, opts] {
    apply_json_config(*casino, *cfg);
    run(*opts);
  });
}

}  // namespace smdkit::cli
