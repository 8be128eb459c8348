#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "emit.hpp"
#include "smdkit/problems.hpp"
#include "smdkit/smd.hpp"
#include "smdkit/zeroth_order.hpp"

namespace smdkit::cli {
namespace {

struct ZoOpts {
  std::string feedback = "two-point";
  std::vector<std::size_t> dims = {4, 16, 64};
  double eps = 0.1;
  double m2 = 1.8;
  double l2 = 1.0;
  double value_bound = 2.0;
  double noise_scale = 0.05;
  double bias = 0.0;
  double bias_cell = 0.01;
  std::string shape = "quadratic";
  std::vector<double> target;
  std::string geometry = "euclidean-simplex";
  double radius = 0.0;             /* 0 = geometry default */
  std::uint64_t seed = 0;
  std::string second_probe = "matched";
  long N = 0;                      /* 0 = budget from the surrogate moment */
  long max_calls = 20000000;
  bool budget_only = false;
  long trace_stride = 0;
  std::string out;
  std::string tag;
};

FeedbackKind parse_feedback(const std::string& name) {
  if (name == "one-point") return FeedbackKind::one_point;
  if (name == "two-point") return FeedbackKind::two_point;
  if (name == "directional") return FeedbackKind::directional;
  if (name == "double-smoothed") return FeedbackKind::double_smoothed;
  throw ConfigError("invalid config: --feedback must be one-point, two-point, "
                    "directional, or double-smoothed (got " + name + ")");
}

SyntheticValueProblem::Shape parse_shape(const std::string& name) {
  if (name == "linear") return SyntheticValueProblem::Shape::linear;
  if (name == "quadratic") return SyntheticValueProblem::Shape::quadratic;
  if (name == "norm") return SyntheticValueProblem::Shape::norm;
  throw ConfigError("invalid config: --shape must be linear, quadratic, or "
                    "norm (got " + name + ")");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void run(const ZoOpts& o) {
  if (o.dims.empty()) throw ConfigError("invalid config: --dims is empty");
  if (!(o.eps > 0.0)) throw ConfigError("invalid config: --eps must be positive");
  if (!(o.m2 > 0.0)) throw ConfigError("invalid config: --m2 must be positive");
  if (o.N < 0) throw ConfigError("invalid config: --N must be nonnegative");
  if (o.max_calls < 1) {
    throw ConfigError("invalid config: --max-calls must be at least 1");
  }
  FeedbackKind kind = parse_feedback(o.feedback);
  SecondProbe probe = o.second_probe == "rescaled" ? SecondProbe::rescaled
                                                   : SecondProbe::matched;
  if (o.second_probe != "matched" && o.second_probe != "rescaled") {
    throw ConfigError("invalid config: --second-probe must be matched or "
                      "rescaled");
  }
  if (probe == SecondProbe::rescaled && kind != FeedbackKind::double_smoothed) {
    throw ConfigError("invalid config: --second-probe applies to --feedback "
                      "double-smoothed only");
  }
  auto shape = parse_shape(o.shape);
  ProxKind gkind = parse_geometry(o.geometry);
  if (shape == SyntheticValueProblem::Shape::linear &&
      gkind == ProxKind::euclidean_free) {
    throw ConfigError("invalid config: --shape linear has no minimum on an "
                      "unconstrained geometry; use a simplex geometry");
  }
  if (!o.target.empty() && o.dims.size() != 1) {
    throw ConfigError("invalid config: --target fixes the dimension, so "
                      "--dims must hold one entry");
  }

  /* Smooth shapes carry the declared curvature; linear and norm do not. */
  std::optional<double> l2;
  if (shape == SyntheticValueProblem::Shape::quadratic && o.l2 > 0.0) l2 = o.l2;

  auto make_problem = [&](std::size_t n) {
    std::vector<double> c(o.target);
    if (c.empty()) {
      c.resize(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(i + 1);
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = static_cast<double>(i + 1) / total;
      }
    }
    if (gkind != ProxKind::euclidean_free &&
        shape != SyntheticValueProblem::Shape::linear) {
      double sum = 0.0, lo = 0.0;
      for (double v : c) { sum += v; lo = std::min(lo, v); }
      if (std::abs(sum - 1.0) > 1e-9 || lo < -1e-12) {
        throw ConfigError("invalid config: --target must lie on the simplex "
                          "under a constrained geometry, or the reported "
                          "optimum is not attainable");
      }
    }
    SyntheticValueProblem problem(shape, c, o.noise_scale, o.bias, o.bias_cell,
                                  o.value_bound, o.m2, l2);
    if (shape == SyntheticValueProblem::Shape::linear) {
      double lo = c[0];
      for (double v : c) lo = std::min(lo, v);
      problem.set_optimum_hint(lo);  /* vertex minimum on the simplex */
    }
    return problem;
  };

  std::string tag = !o.tag.empty() ? o.tag : "zo-" + o.feedback;
  auto dir = resolve_out_dir(o.out);
  const int calls_per_step =
      (kind == FeedbackKind::one_point || kind == FeedbackKind::directional)
          ? 1
          : 2;

  CsvFile scaling(dir / (tag + "-scaling.csv"),
                  {"oracle calls against dimension at fixed target accuracy; "
                   "planned_calls = (calls per step) * ceil(2*m_est^2*R^2/"
                   "eps^2) with m_est^2 the surrogate second-moment bound"},
                  {"experiment", "seed", "dim", "iterations", "planned_calls",
                   "oracle_calls", "final_gap"});

  std::vector<double> log_n, log_calls;
  nlohmann::json per_dim = nlohmann::json::array();
  std::printf("%6s %12s %14s %14s %12s\n", "dim", "iterations", "planned",
              "calls", "final_gap");

  for (std::size_t n : o.dims) {
    if (n < 1) throw ConfigError("invalid config: --dims entries must be >= 1");
    auto problem = make_problem(n);
    ProxGeometry geometry(gkind, n);
    double R = o.radius > 0.0 ? o.radius : default_radius(gkind, n);

    SmoothingParams params;
    double m_est = 0.0;
    try {
      params = choose_smoothing_params(o.eps, o.m2, l2, R, n, kind);
      m_est = std::sqrt(surrogate_second_moment(problem, params, geometry.q()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid config: ") + e.what());
    }
    long N = o.N > 0 ? o.N : required_iterations(m_est, R, o.eps);
    long planned = calls_per_step * N;
    std::uint64_t seed = o.seed + n;

    nlohmann::json entry = {{"n", n},
                            {"iterations", N},
                            {"planned_calls", planned},
                            {"tau1", params.tau1},
                            {"tau2", params.tau2}};
    if (params.delta_max) entry["delta_max"] = *params.delta_max;

    if (o.budget_only) {
      scaling.row({tag, std::to_string(seed), std::to_string(n),
                   std::to_string(N), std::to_string(planned), "", ""});
      log_n.push_back(std::log(static_cast<double>(n)));
      log_calls.push_back(std::log(static_cast<double>(planned)));
      std::printf("%6zu %12ld %14ld %14s %12s\n", n, N, planned, "-", "-");
      per_dim.push_back(std::move(entry));
      continue;
    }
    if (planned > o.max_calls) {
      throw ConfigError(
          "invalid config: the " + o.feedback + " budget at n=" +
          std::to_string(n) + " needs " + std::to_string(planned) +
          " oracle calls, above --max-calls " + std::to_string(o.max_calls) +
          "; raise --max-calls, pass --N, or use --budget-only");
    }

    ZeroOrderConfig cfg;
    cfg.iterations = N;
    cfg.radius = R;
    cfg.seed = seed;
    cfg.trace_stride = o.trace_stride;
    cfg.second_probe = probe;
    RunRecord rec = run_zeroth_order(problem, geometry, cfg, params);

    scaling.row({tag, std::to_string(seed), std::to_string(n),
                 std::to_string(N), std::to_string(planned),
                 std::to_string(rec.oracle_calls), num(*rec.final_gap)});
    log_n.push_back(std::log(static_cast<double>(n)));
    log_calls.push_back(std::log(static_cast<double>(rec.oracle_calls)));
    std::printf("%6zu %12ld %14ld %14ld %12s\n", n, N, planned,
                rec.oracle_calls, num(*rec.final_gap).c_str());

    if (o.trace_stride > 0) {
      double h = R / m_est * std::sqrt(2.0 / static_cast<double>(N));
      CsvFile trace(
          dir / (tag + "-n" + std::to_string(n) + ".csv"),
          {"gap: clean objective(average of the first m iterates) - optimum",
           "bound: R^2/(m*h) + h*m_est^2/2 at m = k+1 averaged points, fixed "
           "step h = (R/m_est)*sqrt(2/N), m_est^2 the surrogate second-moment "
           "bound"},
          {"experiment", "seed", "step", "gap", "bound"});
      for (std::size_t r = 0; r < rec.trace_steps.size(); ++r) {
        long k = rec.trace_steps[r];
        double m = static_cast<double>(k + 1);
        std::string gap = r < rec.trace_gaps.size() ? num(rec.trace_gaps[r])
                                                    : std::string();
        trace.row({tag + "-n" + std::to_string(n), std::to_string(seed),
                   std::to_string(k), gap,
                   num(R * R / (m * h) + h * m_est * m_est / 2.0)});
      }
    }

    entry["oracle_calls"] = rec.oracle_calls;
    entry["final_gap"] = *rec.final_gap;
    entry["wall_seconds"] = rec.wall_seconds;
    entry["warnings"] = rec.warnings;
    per_dim.push_back(std::move(entry));
  }

  nlohmann::json summary = {{"experiment", tag},
                            {"feedback", o.feedback},
                            {"eps", o.eps},
                            {"m2", o.m2},
                            {"shape", o.shape},
                            {"geometry", o.geometry},
                            {"second_probe", o.second_probe},
                            {"budget_only", o.budget_only},
                            {"per_dim", per_dim}};
  if (l2) summary["l2"] = *l2;
  if (log_n.size() >= 2) {
    double exponent = fit_slope(log_n, log_calls);
    summary["call_exponent"] = exponent;
    std::printf("fitted call exponent: %s\n", num(exponent).c_str());
  }
  std::printf("wrote %s\n", scaling.path().string().c_str());
  auto spath = dir / (tag + "-summary.json");
  write_json(spath, summary);
  std::printf("wrote %s\n", spath.string().c_str());
}

}  // namespace

void register_zo(CLI::App& app) {
  auto opts = std::make_shared<ZoOpts>();
  CLI::App* cmd = app.add_subcommand(
      "zo", "gradient-free mirror descent from value feedback");
  auto cfg = attach_common(*cmd);
  cmd->add_option("--feedback", opts->feedback,
                  "one-point, two-point, directional, or double-smoothed")
      ->check(CLI::IsMember(
          {"one-point", "two-point", "directional", "double-smoothed"}));
  cmd->add_option("--dims", opts->dims,
                  "comma-separated dimensions for the scaling table")
      ->delimiter(',');
  cmd->add_option("--eps", opts->eps, "target accuracy");
  cmd->add_option("--m2", opts->m2, "declared value-Lipschitz constant");
  cmd->add_option("--l2", opts->l2,
                  "declared gradient-Lipschitz constant (quadratic shape)");
  cmd->add_option("--value-bound", opts->value_bound,
                  "declared bound on |f| near the probes");
  cmd->add_option("--noise-scale", opts->noise_scale,
                  "amplitude of the zero-mean value noise");
  cmd->add_option("--bias", opts->bias,
                  "adversarial (bounded, sign-flipping) value corruption");
  cmd->add_option("--bias-cell", opts->bias_cell,
                  "lattice pitch of the corruption sign");
  cmd->add_option("--shape", opts->shape, "linear, quadratic, or norm")
      ->check(CLI::IsMember({"linear", "quadratic", "norm"}));
  cmd->add_option("--target", opts->target,
                  "objective anchor point as comma-separated coordinates")
      ->delimiter(',');
  cmd->add_option("--geometry", opts->geometry,
                  "entropic, euclidean-simplex, or euclidean-free");
  cmd->add_option("--radius", opts->radius, "override the prox radius R");
  cmd->add_option("--seed", opts->seed, "base seed (per-dim seed = seed + n)");
  cmd->add_option("--second-probe", opts->second_probe,
                  "double-smoothed second probe: matched keeps the first-"
                  "stage offset, rescaled shrinks it to tau2")
      ->check(CLI::IsMember({"matched", "rescaled"}));
  cmd->add_option("--N", opts->N,
                  "override the iteration budget (0 = derive from eps)");
  cmd->add_option("--max-calls", opts->max_calls,
                  "refuse runs whose planned oracle calls exceed this");
  cmd->add_flag("--budget-only", opts->budget_only,
                "emit planned budgets without running");
  cmd->add_option("--trace-stride", opts->trace_stride,
                  "steps between per-dimension trace rows (0 = no trace)");
  cmd->add_option("--out", opts->out,
                  "output directory (default $SMDKIT_OUT_DIR, then ./runs)");
  cmd->add_option("--tag", opts->tag, "experiment id used in file names");
  cmd->callback([cmd, cfg, opts] {
    apply_json_config(*cmd, *cfg);
    run(*opts);
  });
}

}  // namespace smdkit::cli
