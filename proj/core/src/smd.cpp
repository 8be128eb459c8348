#include "smdkit/smd.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smdkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> resolve_start(const ProxGeometry& geometry,
                                  const SolverConfig& config,
                                  const char* where) {
  if (!config.start) return geometry.start_point();
  geometry.require_feasible(*config.start, where);
  return *config.start;
}

void check_gradient(const std::vector<double>& g, std::size_t dim, long step,
                    const char* where) {
  if (g.size() != dim) {
    throw std::runtime_error(std::string(where) + ": oracle returned " +
                             std::to_string(g.size()) + " coordinates at step " +
                             std::to_string(step));
  }
  for (double c : g) {
    if (std::isnan(c)) {
      throw std::runtime_error(std::string(where) +
                               ": oracle returned NaN at step " +
                               std::to_string(step));
    }
  }
}

struct Averager {
  std::vector<double> sum;
  long count = 0;

  explicit Averager(std::size_t n) : sum(n, 0.0) {}

  void add(const std::vector<double>& x) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i];
    ++count;
  }

  std::vector<double> mean() const {
    std::vector<double> m(sum);
    for (double& c : m) c /= static_cast<double>(count);
    return m;
  }
};

void maybe_trace(RunRecord& record, const StochasticOracle& oracle,
                 const SolverConfig& config, long step,
                 const std::vector<double>& iterate, const Averager& avg) {
  if (config.trace_stride <= 0 || step % config.trace_stride != 0) return;
  record.trace_steps.push_back(step);
  record.trace_iterates.push_back(iterate);
  if (avg.count > 0) {
    auto value = oracle.objective(avg.mean());
    auto best = oracle.optimum();
    if (value && best) record.trace_gaps.push_back(*value - *best);
  }
}

void finish(RunRecord& record, const StochasticOracle& oracle,
            const Averager& avg, Clock::time_point t0) {
  record.average = avg.mean();
  auto value = oracle.objective(record.average);
  auto best = oracle.optimum();
  if (value && best) record.final_gap = *value - *best;
  record.wall_seconds = seconds_since(t0);
}

}  // namespace

long required_iterations(double M, double R, double eps) {
  if (!(M > 0.0) || !(R > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument(
        "required_iterations: M, R, eps must be positive");
  }
  double raw = 2.0 * M * M * R * R / (eps * eps);
  /* Plug-in values like eps = 0.3 land within one ulp of an integer; nudge
   * before the ceiling so they do not round up spuriously. */
  double n = std::ceil(raw * (1.0 - 1e-12));
  return std::max(1L, static_cast<long>(n));
}

double fixed_step_gap_bound(double M, double R, long N) {
  return M * R * std::sqrt(2.0 / static_cast<double>(N));
}

double strongly_convex_gap_bound(double M2, double mu2, long N, double delta) {
  double n = static_cast<double>(N);
  return M2 * M2 * (1.0 + std::log(n)) / (2.0 * mu2 * n) + delta;
}

RunRecord run_smd(const StochasticOracle& oracle, const ProxGeometry& geometry,
                  const SolverConfig& config) {
  if (config.step_rule != StepRule::fixed) {
    throw std::invalid_argument("run_smd: step rule must be fixed");
  }
  if (config.iterations < 1) {
    throw std::invalid_argument("run_smd: iteration count must be >= 1");
  }
  if (!(config.radius > 0.0)) {
    throw std::invalid_argument("run_smd: radius must be positive");
  }
  if (oracle.dim() != geometry.dim()) {
    throw std::invalid_argument("run_smd: oracle/geometry dimension mismatch");
  }

  auto t0 = Clock::now();
  RunRecord record;
  Rng rng(config.seed);
  const long N = config.iterations;
  const double h =
      config.radius / oracle.grad_bound() * std::sqrt(2.0 / static_cast<double>(N));

  std::vector<double> x = resolve_start(geometry, config, "run_smd");
  Averager avg(geometry.dim());
  for (long k = 0; k < N; ++k) {
    avg.add(x);
    maybe_trace(record, oracle, config, k, x, avg);
    std::vector<double> g = oracle.grad(x, rng);
    check_gradient(g, geometry.dim(), k, "run_smd");
    ++record.oracle_calls;
    x = geometry.mirror_step(x, g, h);
  }
  finish(record, oracle, avg, t0);
  return record;
}

RunRecord run_smd_strongly_convex(const StochasticOracle& oracle,
                                  const ProxGeometry& geometry,
                                  const SolverConfig& config) {
  if (config.step_rule != StepRule::inverse_k) {
    throw std::invalid_argument(
        "run_smd_strongly_convex: step rule must be inverse_k");
  }
  if (config.iterations < 1) {
    throw std::invalid_argument(
        "run_smd_strongly_convex: iteration count must be >= 1");
  }
  if (geometry.kind() == ProxKind::entropic_simplex) {
    throw std::invalid_argument(
        "run_smd_strongly_convex: needs a Euclidean geometry");
  }
  const double mu2 = oracle.strong_convexity();
  if (!(mu2 > 0.0)) {
    throw std::invalid_argument(
        "run_smd_strongly_convex: oracle declares no strong convexity; "
        "use run_smd");
  }
  if (oracle.dim() != geometry.dim()) {
    throw std::invalid_argument(
        "run_smd_strongly_convex: oracle/geometry dimension mismatch");
  }

  auto t0 = Clock::now();
  RunRecord record;
  Rng rng(config.seed);
  const long N = config.iterations;

  std::vector<double> x = resolve_start(geometry, config, "run_smd_strongly_convex");
  Averager avg(geometry.dim());
  /* Steps are indexed from 1; the average covers x^1 ... x^N (the point
   * *before* each step), so exactly N oracle calls are made. */
  for (long k = 1; k <= N; ++k) {
    avg.add(x);
    maybe_trace(record, oracle, config, k, x, avg);
    std::vector<double> g = oracle.grad(x, rng);
    check_gradient(g, geometry.dim(), k, "run_smd_strongly_convex");
    ++record.oracle_calls;
    x = geometry.mirror_step(x, g, 1.0 / (mu2 * static_cast<double>(k)));
  }
  finish(record, oracle, avg, t0);
  return record;
}

long confidence_trajectories(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0)) {
    throw std::invalid_argument(
        "confidence_trajectories: sigma must lie in (0, 1)");
  }
  double k = std::ceil(2.0 * std::log2(1.0 / sigma) * (1.0 - 1e-12));
  return std::max(1L, static_cast<long>(k));
}

RunRecord run_parallel_aggregate(const OracleFactory& factory,
                                 const ProxGeometry& geometry,
                                 const SolverConfig& config, double sigma) {
  const long K = confidence_trajectories(sigma);
  auto t0 = Clock::now();
  RunRecord record;
  Averager total(geometry.dim());

  std::unique_ptr<StochasticOracle> first;  /* kept for gap reporting */
  for (long i = 0; i < K; ++i) {
    auto oracle = factory(static_cast<std::size_t>(i));
    if (!oracle) {
      throw std::runtime_error("run_parallel_aggregate: factory returned null for trajectory " +
                               std::to_string(i));
    }
    SolverConfig sub = config;
    sub.seed = Rng::stream(config.seed, static_cast<std::uint64_t>(i)).bits();
    sub.trace_stride = 0;
    RunRecord traj;
    try {
      traj = run_smd(*oracle, geometry, sub);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_parallel_aggregate: trajectory " +
                               std::to_string(i) + " aborted: " + e.what());
    }
    record.oracle_calls += traj.oracle_calls;
    record.trajectory_averages.push_back(traj.average);
    total.add(traj.average);

    if (i == 0) {
      if (oracle->noise_model() == NoiseModel::heavy_tail) {
        double alpha = oracle->tail_index();
        /* Validity of the confidence aggregate needs
         * sigma^{-1/(alpha-1)} well below N. */
        if (alpha > 1.0 &&
            std::pow(sigma, -1.0 / (alpha - 1.0)) >
                static_cast<double>(config.iterations) / 10.0) {
          record.warnings.push_back(
              "heavy-tail oracle: sigma^(-1/(alpha-1)) is not small against N; "
              "confidence target may be missed");
        }
      }
      first = std::move(oracle);
    }
  }

  record.average = total.mean();
  if (first) {
    auto value = first->objective(record.average);
    auto best = first->optimum();
    if (value && best) record.final_gap = *value - *best;
  }
  record.wall_seconds = seconds_since(t0);
  return record;
}

}  // namespace smdkit
