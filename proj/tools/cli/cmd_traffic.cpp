#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "emit.hpp"
#include "smdkit/traffic.hpp"
#include "smdkit/traffic_io.hpp"

namespace smdkit::cli {
namespace {

std::string net_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

nlohmann::json od_flows_json(const RoadNetwork& net,
                             const std::vector<double>& x) {
  nlohmann::json arr = nlohmann::json::array();
  const auto& ods = net.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    nlohmann::json flows = nlohmann::json::array();
    std::size_t off = net.path_offset(w);
    for (std::size_t i = 0; i < ods[w].paths.size(); ++i) {
      flows.push_back(x[off + i]);
    }
    arr.push_back({{"origin", ods[w].origin},
                   {"dest", ods[w].dest},
                   {"demand", ods[w].demand},
                   {"flows", std::move(flows)}});
  }
  return arr;
}

RoadNetwork load_required_network(const std::string& path) {
  if (path.empty()) throw ConfigError("invalid config: --network is required");
  return load_network(path);
}

nlohmann::json edge_map_json(const RoadNetwork& net,
                             const std::vector<double>& v) {
  nlohmann::json obj = nlohmann::json::object();
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    obj[net.edges()[e].id] = v[e];
  }
  return obj;
}

/* ---------------------------------------------------------------- */

struct EqOpts {
  std::string network;
  long N = 10000;
  long trace_stride = 0;           /* 0 = N/100 */
  std::optional<double> psi_lower;
  std::string out;
  std::string tag;
};

void run_eq(const EqOpts& o) {
  if (o.N < 1) {
    throw ConfigError("invalid config: --N must be at least 1 (got " +
                      std::to_string(o.N) + ")");
  }
  RoadNetwork net = load_required_network(o.network);
  std::string tag = !o.tag.empty() ? o.tag : "traffic-eq-" + net_stem(o.network);
  auto dir = resolve_out_dir(o.out);
  long stride = o.trace_stride > 0 ? o.trace_stride : auto_stride(o.N);

  TrafficEqRecord rec = run_exp_weights_traffic(net, o.N, stride, o.psi_lower);

  auto file = dir / (tag + ".csv");
  CsvFile csv(
      file,
      {"potential: Beckmann value of the running average flows",
       "gap: potential - certified lower bound on the optimum",
       "bound: horizon guarantee (cost_bound/sqrt(N) * max_w ln n_w / "
       "sqrt(2 min_w ln n_w) * (sum_w d_w^2 + 1)) scaled by (N/m + 1)/2 at "
       "m = k+1 averaged rounds; the steps are tuned to N, so the running "
       "average obeys the same constants with sqrt(N)/m + 1/sqrt(N) in place "
       "of 2/sqrt(N)"},
      {"experiment", "seed", "step", "potential", "gap", "bound"});
  for (std::size_t r = 0; r < rec.trace_steps.size(); ++r) {
    long k = rec.trace_steps[r];
    double m = static_cast<double>(k + 1);
    double bound = rec.bound * (static_cast<double>(o.N) / m + 1.0) / 2.0;
    csv.row({tag, "0", std::to_string(k), num(rec.trace_potentials[r]),
             num(rec.trace_gaps[r]), num(bound)});
  }
  std::printf("wrote %s\n", file.string().c_str());

  nlohmann::json summary = {{"experiment", tag},
                            {"network", o.network},
                            {"rounds", rec.rounds},
                            {"potential", rec.potential},
                            {"psi_star_lower", rec.psi_star_lower},
                            {"gap", rec.gap},
                            {"bound", rec.bound},
                            {"within_bound", rec.gap <= rec.bound},
                            {"path_flows", od_flows_json(net, rec.path_flows)},
                            {"edge_flows", edge_map_json(net, rec.edge_flows)},
                            {"wall_seconds", rec.wall_seconds}};
  auto spath = dir / (tag + "-summary.json");
  write_json(spath, summary);
  std::printf("wrote %s\n", spath.string().c_str());
  std::printf("gap %s vs bound %s after %ld rounds\n", num(rec.gap).c_str(),
              num(rec.bound).c_str(), rec.rounds);
}

/* ---------------------------------------------------------------- */

struct LogitOpts {
  std::string network;
  double gamma = 0.1;
  double lambda = 1.0;
  long time_scale = 10;
  long ticks = 10000;
  std::string mode = "mean-field";
  long agents_per_unit = 100;
  std::uint64_t seed = 0;
  long trace_stride = 0;           /* 0 = ticks/100 */
  std::string out;
  std::string tag;
};

void run_logit(const LogitOpts& o) {
  if (!(o.gamma > 0.0)) throw ConfigError("invalid config: --gamma must be positive");
  if (!(o.lambda > 0.0)) throw ConfigError("invalid config: --lambda must be positive");
  if (o.time_scale < 1) throw ConfigError("invalid config: --time-scale must be at least 1");
  if (o.lambda > static_cast<double>(o.time_scale)) {
    throw ConfigError("invalid config: --lambda above --time-scale makes the "
                      "revision probability exceed 1");
  }
  if (o.ticks < 1) throw ConfigError("invalid config: --ticks must be at least 1");
  DynamicsMode mode;
  if (o.mode == "mean-field") mode = DynamicsMode::mean_field;
  else if (o.mode == "agent") mode = DynamicsMode::agent;
  else throw ConfigError("invalid config: --mode must be mean-field or agent");
  if (mode == DynamicsMode::agent && o.agents_per_unit < 1) {
    throw ConfigError("invalid config: --agents-per-unit must be at least 1");
  }

  RoadNetwork net = load_required_network(o.network);
  std::string tag =
      !o.tag.empty() ? o.tag : "traffic-logit-" + net_stem(o.network);
  auto dir = resolve_out_dir(o.out);

  LogitDynamicsConfig cfg;
  cfg.gamma = o.gamma;
  cfg.lambda = o.lambda;
  cfg.time_scale = o.time_scale;
  cfg.ticks = o.ticks;
  cfg.mode = mode;
  cfg.agents_per_unit = o.agents_per_unit;
  cfg.seed = o.seed;
  cfg.trace_stride = o.trace_stride > 0 ? o.trace_stride : auto_stride(o.ticks);

  DynamicsRecord rec = run_logit_dynamics(net, cfg);

  std::vector<std::string> cols = {"experiment", "seed", "step", "potential"};
  for (std::size_t p = 0; p < net.path_count(); ++p) {
    cols.push_back("x" + std::to_string(p));
  }
  auto file = dir / (tag + ".csv");
  CsvFile csv(file,
              {"potential: Beckmann + gamma * sum x ln(x/d) at the traced tick",
               "x<i>: path flows stacked per od_pairs block"},
              cols);
  for (std::size_t r = 0; r < rec.trace_steps.size(); ++r) {
    std::vector<std::string> cells = {tag, std::to_string(o.seed),
                                      std::to_string(rec.trace_steps[r]),
                                      num(rec.trace_potentials[r])};
    for (double v : rec.trace_flows[r]) cells.push_back(num(v));
    csv.row(cells);
  }
  std::printf("wrote %s\n", file.string().c_str());

  nlohmann::json summary = {
      {"experiment", tag},
      {"network", o.network},
      {"gamma", o.gamma},
      {"lambda", o.lambda},
      {"time_scale", o.time_scale},
      {"ticks", o.ticks},
      {"mode", o.mode},
      {"seed", o.seed},
      {"final_flows", od_flows_json(net, rec.final_flows)},
      {"average_flows", od_flows_json(net, rec.average_flows)},
      {"final_potential", entropy_potential(net, rec.final_flows, o.gamma)},
      {"wall_seconds", rec.wall_seconds}};
  if (mode == DynamicsMode::agent) summary["agents_per_unit"] = o.agents_per_unit;
  auto spath = dir / (tag + "-summary.json");
  write_json(spath, summary);
  std::printf("wrote %s\n", spath.string().c_str());
}

/* ---------------------------------------------------------------- */

struct DualOpts {
  std::string network;
  double gamma = 0.1;
  double tol = 1e-8;
  long max_iters = 100000;
  std::string method = "fixed-point";
  long trace_stride = 0;           /* 0 = no trace */
  std::string out;
  std::string tag;
};

void run_dual(const DualOpts& o) {
  if (!(o.gamma > 0.0)) throw ConfigError("invalid config: --gamma must be positive");
  if (!(o.tol > 0.0)) throw ConfigError("invalid config: --tol must be positive");
  if (o.max_iters < 1) throw ConfigError("invalid config: --max-iters must be at least 1");
  DualMethod method;
  if (o.method == "fixed-point") method = DualMethod::fixed_point;
  else if (o.method == "dual-gradient") method = DualMethod::dual_gradient;
  else {
    throw ConfigError("invalid config: --method must be fixed-point or "
                      "dual-gradient");
  }

  RoadNetwork net = load_required_network(o.network);
  std::string tag =
      !o.tag.empty() ? o.tag : "traffic-dual-" + net_stem(o.network);
  auto dir = resolve_out_dir(o.out);

  DualState st = solve_dual(net, o.gamma, o.tol, o.max_iters, method,
                            o.trace_stride);

  if (o.trace_stride > 0) {
    auto file = dir / (tag + ".csv");
    CsvFile csv(file,
                {"residual: per-iteration convergence measure (flow-space "
                 "chain mismatch max|F(f)-f| for fixed-point; time-space "
                 "step residual for dual-gradient)"},
                {"experiment", "seed", "step", "residual"});
    for (std::size_t r = 0; r < st.trace_steps.size(); ++r) {
      csv.row({tag, "0", std::to_string(st.trace_steps[r]),
               num(st.trace_residuals[r])});
    }
    std::printf("wrote %s\n", file.string().c_str());
  }

  double primal = entropy_potential(net, st.path_flows, o.gamma);
  DualEval dual = smoothed_dual_objective(net, st.times, o.gamma);
  nlohmann::json state = {
      {"experiment", tag},
      {"network", o.network},
      {"method", o.method},
      {"gamma", st.gamma},
      {"converged", st.converged},
      {"iterations", st.iterations},
      {"residual", st.residual},
      {"residual_through_times", fixed_point_residual(net, st.times, o.gamma)},
      {"times", edge_map_json(net, st.times)},
      {"edge_flows", edge_map_json(net, st.edge_flows)},
      {"path_flows", od_flows_json(net, st.path_flows)},
      {"primal_potential", primal},
      {"dual_value", dual.value},
      {"duality_gap", primal + dual.value}};
  auto spath = dir / (tag + ".json");
  write_json(spath, state);
  std::printf("wrote %s\n", spath.string().c_str());
  std::printf("%s after %ld iterations, residual %s, duality gap %s\n",
              st.converged ? "converged" : "NOT converged", st.iterations,
              num(st.residual).c_str(), num(primal + dual.value).c_str());
  if (!st.converged) {
    throw std::runtime_error("solve_dual did not reach tol " + num(o.tol) +
                             " within " + std::to_string(o.max_iters) +
                             " iterations");
  }
}

/* ---------------------------------------------------------------- */

struct CheckOpts {
  std::string network;
  double gamma = 0.1;
  double tol = 1e-6;
  double grad_tol = 1e-5;
  long max_iters = 200000;
  std::string out;
  std::string tag;
};

void run_checks(const CheckOpts& o) {
  if (!(o.gamma > 0.0)) throw ConfigError("invalid config: --gamma must be positive");
  if (!(o.tol > 0.0)) throw ConfigError("invalid config: --tol must be positive");
  if (!(o.grad_tol > 0.0)) throw ConfigError("invalid config: --grad-tol must be positive");
  if (o.max_iters < 1) throw ConfigError("invalid config: --max-iters must be at least 1");

  RoadNetwork net = load_required_network(o.network);
  std::string tag =
      !o.tag.empty() ? o.tag : "traffic-check-" + net_stem(o.network);

  int fails = 0;
  nlohmann::json results = nlohmann::json::array();
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %-16s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    results.push_back({{"name", name}, {"passed", ok}, {"detail", detail}});
    if (!ok) ++fails;
  };

  /* Solve once at a stricter tolerance so the residual gate has headroom. */
  DualState st = solve_dual(net, o.gamma, o.tol / 10.0, o.max_iters);
  report("dual-converged", st.converged,
         "iterations=" + std::to_string(st.iterations) + " residual=" +
             num(st.residual));

  /* The solver's flow-space chain residual is the contract quantity; the
   * recomputation through the stored times saturates once a low-mu link's
   * equilibrium flow is too small for t - t0 to represent, so it is shown
   * for information only. */
  double tres = fixed_point_residual(net, st.times, o.gamma);
  report("chain-residual", st.residual <= o.tol,
         "residual=" + num(st.residual) + " (through times: " + num(tres) +
             ") tol=" + num(o.tol));

  double primal = entropy_potential(net, st.path_flows, o.gamma);
  double gap = primal + smoothed_dual_objective(net, st.times, o.gamma).value;
  double scale = 1.0 + std::abs(primal);
  report("duality-gap", gap >= -1e-9 * scale && gap <= o.tol * scale,
         "gap=" + num(gap) + " allowance=" + num(o.tol * scale));

  /* Gradient against central differences at perturbed times; rho = 0 links
   * admit only t = t0 and stay pinned. */
  {
    Rng rng(1717);
    std::vector<double> t(net.edges().size());
    for (std::size_t e = 0; e < t.size(); ++e) {
      const Edge& edge = net.edges()[e];
      t[e] = edge.rho > 0.0 ? edge.t0 * (1.05 + 0.45 * rng.uniform())
                            : edge.t0;
    }
    DualEval ev = smoothed_dual_objective(net, t, o.gamma);
    double worst = 0.0;
    for (std::size_t e = 0; e < t.size(); ++e) {
      if (!(net.edges()[e].rho > 0.0)) continue;
      double h = 1e-5 * (1.0 + std::abs(t[e]));
      std::vector<double> tp(t), tm(t);
      tp[e] += h;
      tm[e] -= h;
      double fd = (smoothed_dual_objective(net, tp, o.gamma).value -
                   smoothed_dual_objective(net, tm, o.gamma).value) /
                  (2.0 * h);
      worst = std::max(worst, std::abs(ev.gradient[e] - fd) /
                                  (1.0 + std::abs(ev.gradient[e])));
    }
    report("dual-gradient", worst <= o.grad_tol,
           "max relative difference=" + num(worst) + " tol=" + num(o.grad_tol));
  }

  /* Wardrop condition at a near-limit temperature: the logit tail mass below
   * the usage threshold then implies cost excess below the tolerance. */
  {
    double gamma_w = 1e-5 * net.cost_ceiling();
    DualState eq = solve_dual(net, gamma_w, 1e-9, std::max(o.max_iters, 200000L));
    WardropReport rep = wardrop_check(net, eq.path_flows);
    std::string slack = std::isfinite(rep.worst_slack)
                            ? num(rep.worst_slack)
                            : std::string("inf (no unused paths)");
    report("wardrop", rep.satisfied, "worst slack=" + slack);
  }

  std::printf("%d/5 checks passed\n", 5 - fails);
  auto dir = resolve_out_dir(o.out);
  auto spath = dir / (tag + ".json");
  write_json(spath, {{"experiment", tag},
                     {"network", o.network},
                     {"gamma", o.gamma},
                     {"tol", o.tol},
                     {"checks", results},
                     {"failed", fails}});
  std::printf("wrote %s\n", spath.string().c_str());
  if (fails > 0) throw CheckFailure{fails};
}

/* ---------------------------------------------------------------- */

/* Required, but enforced in load_required_network rather than through
 * CLI11 so a config file can also supply it. */
void add_network_flag(CLI::App& cmd, std::string& slot) {
  cmd.add_option("--network", slot, "network JSON file")
      ->check(CLI::ExistingFile);
}

}  // namespace

void register_traffic(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand(
      "traffic", "congestion-game equilibria on road networks");
  cmd->set_help_flag("--help", "print this help and exit");
  cmd->require_subcommand(1);

  {
    auto opts = std::make_shared<EqOpts>();
    CLI::App* sub = cmd->add_subcommand(
        "equilibrium", "per-OD multiplicative-weights dynamics with a "
                       "potential-gap certificate");
    auto cfg = attach_common(*sub);
    add_network_flag(*sub, opts->network);
    sub->add_option("--N", opts->N, "number of rounds");
    sub->add_option("--trace-stride", opts->trace_stride,
                    "rounds between trace rows (default N/100)");
    sub->add_option("--psi-lower", opts->psi_lower,
                    "externally certified lower bound on the optimum "
                    "(default: computed from a small-temperature solve)");
    sub->add_option("--out", opts->out,
                    "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
    sub->add_option("--tag", opts->tag, "experiment id used in file names");
    sub->callback([sub, cfg, opts] {
      apply_json_config(*sub, *cfg);
      run_eq(*opts);
    });
  }
  {
    auto opts = std::make_shared<LogitOpts>();
    CLI::App* sub = cmd->add_subcommand(
        "logit", "revision dynamics with softmin path choice");
    auto cfg = attach_common(*sub);
    add_network_flag(*sub, opts->network);
    sub->add_option("--gamma", opts->gamma, "choice temperature");
    sub->add_option("--lambda", opts->lambda, "revision rate");
    sub->add_option("--time-scale", opts->time_scale,
                    "ticks per unit time (revision probability = "
                    "lambda/time-scale)");
    sub->add_option("--ticks", opts->ticks, "number of ticks");
    sub->add_option("--mode", opts->mode, "mean-field or agent")
        ->check(CLI::IsMember({"mean-field", "agent"}));
    sub->add_option("--agents-per-unit", opts->agents_per_unit,
                    "agents per unit of demand in agent mode");
    sub->add_option("--seed", opts->seed, "seed for agent revisions");
    sub->add_option("--trace-stride", opts->trace_stride,
                    "ticks between trace rows (default ticks/100)");
    sub->add_option("--out", opts->out,
                    "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
    sub->add_option("--tag", opts->tag, "experiment id used in file names");
    sub->callback([sub, cfg, opts] {
      apply_json_config(*sub, *cfg);
      run_logit(*opts);
    });
  }
  {
    auto opts = std::make_shared<DualOpts>();
    CLI::App* sub = cmd->add_subcommand(
        "dual", "smoothed equilibrium via the dual over link times");
    auto cfg = attach_common(*sub);
    add_network_flag(*sub, opts->network);
    sub->add_option("--gamma", opts->gamma, "smoothing temperature");
    sub->add_option("--tol", opts->tol, "convergence tolerance");
    sub->add_option("--max-iters", opts->max_iters, "iteration cap");
    sub->add_option("--method", opts->method,
                    "fixed-point (averaged chain) or dual-gradient "
                    "(projected descent cross-check)")
        ->check(CLI::IsMember({"fixed-point", "dual-gradient"}));
    sub->add_option("--trace-stride", opts->trace_stride,
                    "iterations between residual trace rows (0 = no trace)");
    sub->add_option("--out", opts->out,
                    "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
    sub->add_option("--tag", opts->tag, "experiment id used in file names");
    sub->callback([sub, cfg, opts] {
      apply_json_config(*sub, *cfg);
      run_dual(*opts);
    });
  }
  {
    auto opts = std::make_shared<CheckOpts>();
    CLI::App* sub = cmd->add_subcommand(
        "check", "equilibrium sanity checks: convergence, chain residual, "
                 "duality gap, dual gradient, Wardrop condition");
    auto cfg = attach_common(*sub);
    add_network_flag(*sub, opts->network);
    sub->add_option("--gamma", opts->gamma, "smoothing temperature");
    sub->add_option("--tol", opts->tol,
                    "residual and duality-gap tolerance");
    sub->add_option("--grad-tol", opts->grad_tol,
                    "relative tolerance for the finite-difference gradient "
                    "comparison");
    sub->add_option("--max-iters", opts->max_iters, "solver iteration cap");
    sub->add_option("--out", opts->out,
                    "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
    sub->add_option("--tag", opts->tag, "experiment id used in file names");
    sub->callback([sub, cfg, opts] {
      apply_json_config(*sub, *cfg);
      run_checks(*opts);
    });
  }
}

}  // namespace smdkit::cli
