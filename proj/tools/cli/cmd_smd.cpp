#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "commands.hpp"
#include "emit.hpp"
#include "smdkit/problems.hpp"
#include "smdkit/smd.hpp"

namespace smdkit::cli {
namespace {

struct SmdOpts {
  std::string problem = "simplex-linear";
  std::size_t n = 10;
  long N = 1000;
  int seeds = 1;
  std::uint64_t seed = 0;
  std::string noise = "bounded";
  std::string step_rule = "fixed";
  std::string geometry;            /* empty = per-problem default */
  double radius = 0.0;             /* 0 = auto */
  double grad_bound = 0.0;         /* 0 = per-problem default */
  double mu = 1.0;
  double bias = 0.0;
  double noise_scale = 0.3;
  std::vector<double> target;
  bool parallel = false;
  double sigma = 0.1;
  long trace_stride = 0;           /* 0 = N/100 */
  std::string out;
  std::string tag;
  bool n_given = false;
};

NoiseModel parse_noise(const std::string& name) {
  if (name == "bounded") return NoiseModel::bounded;
  if (name == "subgaussian") return NoiseModel::subgaussian;
  if (name == "heavy-tail") return NoiseModel::heavy_tail;
  throw ConfigError("invalid config: --noise must be bounded, subgaussian, or "
                    "heavy-tail (got " + name + ")");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void run(const SmdOpts& o) {
  if (o.N < 1) {
    throw ConfigError("invalid config: --N must be at least 1 (got " +
                      std::to_string(o.N) + ")");
  }
  if (o.seeds < 1) throw ConfigError("invalid config: --seeds must be at least 1");
  if (!(o.noise_scale >= 0.0)) {
    throw ConfigError("invalid config: --noise-scale must be nonnegative");
  }
  const bool quadratic = o.problem == "quadratic";
  if (!quadratic && o.problem != "simplex-linear") {
    throw ConfigError("invalid config: --problem must be simplex-linear or "
                      "quadratic (got " + o.problem + ")");
  }
  const bool strongly = o.step_rule == "inverse-k";
  if (!strongly && o.step_rule != "fixed") {
    throw ConfigError("invalid config: --step-rule must be fixed or inverse-k");
  }
  if (strongly && !quadratic) {
    throw ConfigError("invalid config: --step-rule inverse-k needs the "
                      "strongly convex quadratic (--problem quadratic)");
  }
  if (strongly && o.parallel) {
    throw ConfigError("invalid config: --parallel aggregates fixed-step runs; "
                      "drop --step-rule inverse-k");
  }
  if (o.parallel && !(o.sigma > 0.0 && o.sigma < 1.0)) {
    throw ConfigError("invalid config: --sigma must lie in (0, 1)");
  }

  /* Target point / cost vector. */
  std::size_t n = o.target.empty() ? o.n : o.target.size();
  if (!o.target.empty() && o.n_given && o.target.size() != o.n) {
    throw ConfigError("invalid config: --target length does not match --n");
  }
  std::vector<double> c(o.target);
  if (quadratic && c.empty()) {
    /* Ramp through [-0.5, 0.5]; optimum stays off the start point. */
    c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = n > 1 ? 0.5 * (1.0 - 2.0 * static_cast<double>(i) /
                                      static_cast<double>(n - 1))
                   : 0.5;
    }
  }
  if (!quadratic && !c.empty()) {
    throw ConfigError("invalid config: --target applies to --problem "
                      "quadratic; simplex-linear uses its canonical costs");
  }
  if (!quadratic && n < 2) {
    throw ConfigError("invalid config: --n must be at least 2 for "
                      "simplex-linear");
  }
  if (quadratic && n < 1) throw ConfigError("invalid config: --n must be at least 1");
  if (quadratic && !(o.mu > 0.0)) {
    throw ConfigError("invalid config: --mu must be positive");
  }

  ProxKind kind = parse_geometry(
      !o.geometry.empty() ? o.geometry
                          : (quadratic ? "euclidean-free" : "entropic"));
  if (quadratic && kind == ProxKind::entropic_simplex) {
    throw ConfigError("invalid config: --geometry entropic reports gaps "
                      "against the unconstrained quadratic optimum; use "
                      "euclidean-free or euclidean-simplex");
  }
  if (quadratic && kind == ProxKind::euclidean_simplex) {
    double sum = 0.0, lo = 0.0;
    for (double v : c) { sum += v; lo = std::min(lo, v); }
    if (std::abs(sum - 1.0) > 1e-9 || lo < -1e-12) {
      throw ConfigError("invalid config: --target must lie on the simplex "
                        "when --geometry is euclidean-simplex, or the "
                        "reported optimum is not attainable");
    }
  }
  ProxGeometry geometry(kind, n);

  double cnorm = 0.0;
  for (double v : c) cnorm += v * v;
  cnorm = std::sqrt(cnorm);
  double R = o.radius > 0.0
                 ? o.radius
                 : (kind == ProxKind::euclidean_free ? std::max(1.0, cnorm)
                                                     : default_radius(kind, n));
  double M = o.grad_bound > 0.0 ? o.grad_bound : (quadratic ? 1.5 : 1.0);
  NoiseModel model = parse_noise(o.noise);

  auto make_oracle = [&]() -> std::unique_ptr<StochasticOracle> {
    if (quadratic) {
      return std::make_unique<QuadraticProblem>(c, o.mu, o.noise_scale, M,
                                                o.bias);
    }
    return std::make_unique<SimplexLinearProblem>(
        SimplexLinearProblem::canonical(n, model));
  };
  auto oracle = make_oracle();

  long stride = o.trace_stride > 0 ? o.trace_stride : auto_stride(o.N);
  std::string tag = !o.tag.empty()
                        ? o.tag
                        : "smd-" + o.problem + (o.parallel ? "-parallel" : "");
  auto dir = resolve_out_dir(o.out);

  nlohmann::json summary;
  summary["experiment"] = tag;
  summary["problem"] = o.problem;
  summary["n"] = n;
  summary["N"] = o.N;
  summary["geometry"] = kind == ProxKind::entropic_simplex ? "entropic"
                        : kind == ProxKind::euclidean_free ? "euclidean-free"
                                                           : "euclidean-simplex";
  summary["step_rule"] = o.step_rule;
  summary["radius"] = R;
  summary["grad_bound"] = M;
  summary["noise"] = o.noise;
  if (quadratic) {
    summary["mu"] = o.mu;
    summary["bias"] = o.bias;
    summary["noise_scale"] = o.noise_scale;
  }

  const double h = R / M * std::sqrt(2.0 / static_cast<double>(o.N));
  std::vector<double> final_gaps;
  nlohmann::json per_seed = nlohmann::json::array();

  for (int i = 0; i < o.seeds; ++i) {
    std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
    SolverConfig cfg;
    cfg.iterations = o.N;
    cfg.radius = R;
    cfg.step_rule = strongly ? StepRule::inverse_k : StepRule::fixed;
    cfg.seed = seed;
    cfg.trace_stride = o.parallel ? 0 : stride;

    RunRecord rec;
    if (o.parallel) {
      auto factory = [&](std::size_t) { return make_oracle(); };
      rec = run_parallel_aggregate(factory, geometry, cfg, o.sigma);
    } else if (strongly) {
      rec = run_smd_strongly_convex(*oracle, geometry, cfg);
    } else {
      rec = run_smd(*oracle, geometry, cfg);
    }

    auto file = dir / (tag + "-seed" + std::to_string(seed) + ".csv");
    if (o.parallel) {
      CsvFile csv(file,
                  {"gap: objective(trajectory average) - optimum, one row per "
                   "independent trajectory",
                   "bound: per-trajectory guarantee M*R*sqrt(2/N) = " +
                       num(fixed_step_gap_bound(M, R, o.N))},
                  {"experiment", "seed", "trajectory", "gap", "bound"});
      nlohmann::json traj = nlohmann::json::array();
      for (std::size_t t = 0; t < rec.trajectory_averages.size(); ++t) {
        double gap = *oracle->objective(rec.trajectory_averages[t]) -
                     *oracle->optimum();
        csv.row({tag, std::to_string(seed), std::to_string(t), num(gap),
                 num(fixed_step_gap_bound(M, R, o.N))});
        traj.push_back(gap);
      }
      per_seed.push_back({{"seed", seed},
                          {"aggregate_gap", *rec.final_gap},
                          {"trajectory_gaps", traj},
                          {"oracle_calls", rec.oracle_calls},
                          {"wall_seconds", rec.wall_seconds},
                          {"warnings", rec.warnings}});
      std::printf("seed %llu: %zu trajectories, aggregate gap %s\n",
                  static_cast<unsigned long long>(seed),
                  rec.trajectory_averages.size(), num(*rec.final_gap).c_str());
    } else {
      std::string bound_note =
          strongly ? "bound: M^2*(1 + ln m)/(2*mu*m) + bias at m = k "
                     "averaged points (decaying steps 1/(mu*k))"
                   : "bound: R^2/(m*h) + h*M^2/2 at m = k+1 averaged points, "
                     "fixed step h = (R/M)*sqrt(2/N); equals M*R*sqrt(2/N) "
                     "at the horizon";
      CsvFile csv(file,
                  {"gap: objective(average of the first m iterates) - optimum",
                   bound_note},
                  {"experiment", "seed", "step", "gap", "bound"});
      for (std::size_t r = 0; r < rec.trace_steps.size(); ++r) {
        long k = rec.trace_steps[r];
        double m = static_cast<double>(strongly ? k : k + 1);
        double bound = strongly
                           ? strongly_convex_gap_bound(M, o.mu,
                                                       static_cast<long>(m),
                                                       o.bias)
                           : R * R / (m * h) + h * M * M / 2.0;
        std::string gap = r < rec.trace_gaps.size() ? num(rec.trace_gaps[r])
                                                    : std::string();
        csv.row({tag, std::to_string(seed), std::to_string(k), gap,
                 num(bound)});
      }
      per_seed.push_back({{"seed", seed},
                          {"final_gap", *rec.final_gap},
                          {"oracle_calls", rec.oracle_calls},
                          {"wall_seconds", rec.wall_seconds},
                          {"warnings", rec.warnings}});
      std::printf("seed %llu: final gap %s after %ld steps\n",
                  static_cast<unsigned long long>(seed),
                  num(*rec.final_gap).c_str(), o.N);
    }
    final_gaps.push_back(*rec.final_gap);
    std::printf("wrote %s\n", file.string().c_str());
  }

  double horizon_bound =
      strongly ? strongly_convex_gap_bound(M, o.mu, o.N, o.bias)
               : fixed_step_gap_bound(M, R, o.N);
  if (o.parallel) {
    summary["sigma"] = o.sigma;
    summary["trajectories"] = confidence_trajectories(o.sigma);
    std::printf("K=%ld trajectories at sigma=%s\n",
                confidence_trajectories(o.sigma), num(o.sigma).c_str());
  }
  summary["bound"] = horizon_bound;
  summary["per_seed"] = per_seed;
  summary["median_final_gap"] = median(final_gaps);
  summary["median_within_bound"] = median(final_gaps) <= horizon_bound;

  auto spath = dir / (tag + "-summary.json");
  write_json(spath, summary);
  std::printf("wrote %s\n", spath.string().c_str());
}

}  // namespace

void register_smd(CLI::App& app) {
  auto opts = std::make_shared<SmdOpts>();
  CLI::App* cmd = app.add_subcommand(
      "smd", "stochastic mirror descent on a synthetic problem");
  auto cfg = attach_common(*cmd);
  cmd->add_option("--problem", opts->problem,
                  "simplex-linear (noisy costs on the simplex) or quadratic "
                  "(strongly convex)")
      ->check(CLI::IsMember({"simplex-linear", "quadratic"}));
  CLI::Option* nopt = cmd->add_option("--n", opts->n, "problem dimension");
  cmd->add_option("--N", opts->N, "iteration count");
  cmd->add_option("--seeds", opts->seeds, "number of consecutive seeds to run");
  cmd->add_option("--seed", opts->seed, "first seed");
  cmd->add_option("--noise", opts->noise,
                  "gradient noise model for simplex-linear")
      ->check(CLI::IsMember({"bounded", "subgaussian", "heavy-tail"}));
  cmd->add_option("--step-rule", opts->step_rule,
                  "fixed (horizon-tuned) or inverse-k (strongly convex)")
      ->check(CLI::IsMember({"fixed", "inverse-k"}));
  cmd->add_option("--geometry", opts->geometry,
                  "entropic, euclidean-simplex, or euclidean-free");
  cmd->add_option("--radius", opts->radius, "override the prox radius R");
  cmd->add_option("--grad-bound", opts->grad_bound,
                  "override the declared gradient bound M");
  cmd->add_option("--mu", opts->mu, "strong convexity of the quadratic");
  cmd->add_option("--bias", opts->bias,
                  "gradient bias injected into the quadratic oracle");
  cmd->add_option("--noise-scale", opts->noise_scale,
                  "per-coordinate noise amplitude of the quadratic oracle");
  cmd->add_option("--target", opts->target,
                  "quadratic optimum as comma-separated coordinates")
      ->delimiter(',');
  cmd->add_flag("--parallel", opts->parallel,
                "average K independent trajectories for a confidence bound");
  cmd->add_option("--sigma", opts->sigma,
                  "confidence failure probability for --parallel");
  cmd->add_option("--trace-stride", opts->trace_stride,
                  "steps between trace rows (default N/100)");
  cmd->add_option("--out", opts->out,
                  "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
  cmd->add_option("--tag", opts->tag, "experiment id used in file names");
  cmd->callback([cmd, cfg, opts, nopt] {
    apply_json_config(*cmd, *cfg);
    opts->n_given = nopt->count() > 0;
    run(*opts);
  });
}

}  // namespace smdkit::cli
