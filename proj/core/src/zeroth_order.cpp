#include "smdkit/zeroth_order.hpp"

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

void check_pair(std::size_t nx, std::size_t ne, const char* where) {
  if (nx == 0 || nx != ne) {
    throw std::invalid_argument(std::string(where) +
                                ": point/direction dimension mismatch");
  }
}

std::vector<double> shifted(std::span<const double> x, double a,
                            std::span<const double> u) {
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += a * u[i];
  return p;
}

void require_domain(const ValueOracle& oracle, const std::vector<double>& p,
                    const char* where) {
  if (!oracle.in_domain(p)) {
    throw std::domain_error(std::string(where) +
                            ": probe point left the oracle domain; shrink "
                            "the smoothing radius");
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

void maybe_trace(RunRecord& record, const ValueOracle& oracle,
                 const ZeroOrderConfig& config, long step,
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

}  // namespace

std::vector<double> sample_sphere(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_sphere: n must be >= 1");
  std::vector<double> e(n);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& c : e) {
      c = rng.normal();
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  double inv = 1.0 / std::sqrt(norm2);
  for (double& c : e) c *= inv;
  return e;
}

std::vector<double> sample_ball(std::size_t n, Rng& rng) {
  std::vector<double> e = sample_sphere(n, rng);
  double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  for (double& c : e) c *= r;
  return e;
}

double sphere_norm_factor(std::size_t n, double q) {
  if (n == 0 || !(q >= 2.0)) {
    throw std::invalid_argument("sphere_norm_factor: need n >= 1 and q >= 2");
  }
  double nn = static_cast<double>(n);
  double expr = std::min(q - 1.0, 16.0 * std::log(nn) - 8.0) *
                std::pow(nn, 2.0 / q - 1.0);
  /* ||e||_q <= ||e||_2 = 1 surely for q >= 2; this also covers small n where
   * the logarithmic expression is nonpositive. */
  if (!(expr > 0.0)) return 1.0;
  return std::min(expr, 1.0);
}

double sphere_alignment_factor(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sphere_alignment_factor: n >= 1");
  return 1.0 / static_cast<double>(n);
}

double sphere_cross_factor(std::size_t n, double q) {
  if (n == 0 || !(q >= 2.0)) {
    throw std::invalid_argument("sphere_cross_factor: need n >= 1 and q >= 2");
  }
  double nn = static_cast<double>(n);
  double expr = std::sqrt(3.0) *
                std::min(2.0 * q - 1.0, 32.0 * std::log(nn) - 8.0) *
                std::pow(nn, 2.0 / q - 2.0);
  /* Sure cap: <c,e>^2 ||e||_q^2 <= <c,e>^2, whose mean is ||c||^2/n. */
  double cap = 1.0 / nn;
  if (!(expr > 0.0)) return cap;
  return std::min(expr, cap);
}

std::vector<double> one_point_gradient(const ValueOracle& oracle,
                                       std::span<const double> x, double tau,
                                       std::span<const double> e, Rng& rng) {
  check_pair(x.size(), e.size(), "one_point_gradient");
  if (!(tau > 0.0)) {
    throw std::invalid_argument("one_point_gradient: tau must be positive");
  }
  std::vector<double> probe = shifted(x, tau, e);
  require_domain(oracle, probe, "one_point_gradient");
  double v = oracle.value(probe, rng);
  double scale = static_cast<double>(x.size()) / tau * v;
  std::vector<double> g(e.begin(), e.end());
  for (double& c : g) c *= scale;
  return g;
}

std::vector<double> two_point_gradient(const ValueOracle& oracle,
                                       std::span<const double> x, double tau,
                                       std::span<const double> e, Rng& rng) {
  check_pair(x.size(), e.size(), "two_point_gradient");
  if (!(tau > 0.0)) {
    throw std::invalid_argument("two_point_gradient: tau must be positive");
  }
  std::vector<double> probe = shifted(x, tau, e);
  require_domain(oracle, probe, "two_point_gradient");
  std::vector<double> base(x.begin(), x.end());
  require_domain(oracle, base, "two_point_gradient");
  /* Both evaluations replay one child stream: common random numbers, so
   * additive noise cancels from the difference. */
  Rng xi = rng.fork();
  Rng xi_replay = xi;
  double fp = oracle.value(probe, xi);
  double f0 = oracle.value(base, xi_replay);
  double scale = static_cast<double>(x.size()) / tau * (fp - f0);
  std::vector<double> g(e.begin(), e.end());
  for (double& c : g) c *= scale;
  return g;
}

std::vector<double> directional_gradient(const ValueOracle& oracle,
                                         std::span<const double> x,
                                         std::span<const double> e, Rng& rng) {
  check_pair(x.size(), e.size(), "directional_gradient");
  if (!oracle.has_gradient()) {
    throw std::invalid_argument(
        "directional_gradient: oracle provides no gradient realizations");
  }
  std::vector<double> grad = oracle.grad(x, rng);
  if (grad.size() != x.size()) {
    throw std::runtime_error("directional_gradient: oracle gradient has wrong size");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * e[i];
  double scale = static_cast<double>(x.size()) * dot;
  std::vector<double> g(e.begin(), e.end());
  for (double& c : g) c *= scale;
  return g;
}

std::vector<double> double_smoothed_gradient(
    const ValueOracle& oracle, std::span<const double> x, double tau1,
    double tau2, std::span<const double> e1, std::span<const double> e2,
    Rng& rng, SecondProbe probe) {
  check_pair(x.size(), e1.size(), "double_smoothed_gradient");
  check_pair(x.size(), e2.size(), "double_smoothed_gradient");
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) {
    throw std::invalid_argument(
        "double_smoothed_gradient: both radii must be positive");
  }
  std::vector<double> far = shifted(x, tau1, e1);
  std::vector<double> p1 = shifted(far, tau2, e2);
  std::vector<double> p2 = probe == SecondProbe::matched
                               ? std::move(far)
                               : shifted(x, tau2, e1);
  require_domain(oracle, p1, "double_smoothed_gradient");
  require_domain(oracle, p2, "double_smoothed_gradient");
  Rng xi = rng.fork();
  Rng xi_replay = xi;
  double f1 = oracle.value(p1, xi);
  double f2 = oracle.value(p2, xi_replay);
  double scale = static_cast<double>(x.size()) / tau2 * (f1 - f2);
  std::vector<double> g(e2.begin(), e2.end());
  for (double& c : g) c *= scale;
  return g;
}

SmoothingParams choose_smoothing_params(double eps, double m2,
                                        std::optional<double> l2,
                                        double radius, std::size_t n,
                                        FeedbackKind kind) {
  if (!(eps > 0.0) || !(m2 > 0.0) || !(radius > 0.0) || n == 0) {
    throw std::invalid_argument(
        "choose_smoothing_params: eps, M2, R must be positive and n >= 1");
  }
  double nn = static_cast<double>(n);
  SmoothingParams out;
  out.kind = kind;
  switch (kind) {
    case FeedbackKind::one_point:
      /* Heuristic radius balancing bias against the 1/tau variance blow-up;
       * no admissible-noise guarantee comes with one-point feedback. */
      out.tau1 = eps / (2.0 * m2);
      break;
    case FeedbackKind::two_point: {
      if (!l2 || !(*l2 > 0.0)) {
        throw std::invalid_argument(
            "choose_smoothing_params: the two-point schedule needs the "
            "gradient smoothness constant; use double-smoothed feedback "
            "when it is unavailable");
      }
      double lo = std::max(eps / (2.0 * m2), std::sqrt(eps / *l2));
      out.tau1 = std::min(lo, (m2 / *l2) * std::sqrt(1.0 / (6.0 * nn)));
      out.delta_max = std::pow(eps, 1.5) / (16.0 * radius * std::sqrt(*l2 * nn));
      break;
    }
    case FeedbackKind::double_smoothed:
      out.tau1 = eps / (4.0 * m2);
      out.tau2 = eps / (4.0 * m2 * nn);
      out.delta_max = eps * eps / (56.0 * m2 * radius * std::pow(nn, 1.5));
      break;
    case FeedbackKind::directional:
      break;  /* exact directional derivatives need no smoothing */
  }
  return out;
}

double surrogate_second_moment(const ValueOracle& oracle,
                               const SmoothingParams& smoothing, double q) {
  std::size_t n = oracle.dim();
  double nn = static_cast<double>(n);
  double s_q = sphere_norm_factor(n, q);
  double w_q = sphere_cross_factor(n, q);
  double m2 = oracle.lipschitz();
  double delta = oracle.bias_level();

  auto need_tau = [&](double tau, const char* what) {
    if (!(tau > 0.0)) {
      throw std::invalid_argument(std::string("surrogate_second_moment: ") +
                                  what + " must be positive");
    }
  };

  switch (smoothing.kind) {
    case FeedbackKind::one_point: {
      need_tau(smoothing.tau1, "tau");
      double a = nn * oracle.value_bound() / smoothing.tau1;
      return a * a * s_q;
    }
    case FeedbackKind::two_point: {
      need_tau(smoothing.tau1, "tau");
      double tau = smoothing.tau1;
      auto l2 = oracle.gradient_lipschitz();
      if (l2) {
        double curv = nn * tau * *l2;
        return 0.75 * curv * curv * s_q + 3.0 * nn * nn * m2 * m2 * w_q +
               12.0 * nn * nn * (delta / tau) * (delta / tau) * s_q;
      }
      /* Nonsmooth fallback: |f(x + tau e) - f(x)| <= M2 tau + 2 delta. */
      return 2.0 * nn * nn * m2 * m2 * s_q +
             8.0 * nn * nn * (delta / tau) * (delta / tau) * s_q;
    }
    case FeedbackKind::double_smoothed: {
      need_tau(smoothing.tau1, "tau1");
      need_tau(smoothing.tau2, "tau2");
      double tau = smoothing.tau2;
      /* Averaging over the tau1-ball smooths any Lipschitz f; the smoothed
       * surface has gradient-Lipschitz constant M2 sqrt(n)/tau1. */
      double l_eff = m2 * std::sqrt(nn) / smoothing.tau1;
      double curv = nn * tau * l_eff;
      return 0.75 * curv * curv * s_q + 3.0 * nn * nn * m2 * m2 * w_q +
             12.0 * nn * nn * (delta / tau) * (delta / tau) * s_q;
    }
    case FeedbackKind::directional:
      return nn * nn * m2 * m2 * w_q;
  }
  throw std::logic_error("surrogate_second_moment: unknown feedback kind");
}

RunRecord run_zeroth_order(const ValueOracle& oracle,
                           const ProxGeometry& geometry,
                           const ZeroOrderConfig& config,
                           const SmoothingParams& smoothing) {
  if (config.iterations < 1) {
    throw std::invalid_argument("run_zeroth_order: iteration count must be >= 1");
  }
  if (!(config.radius > 0.0)) {
    throw std::invalid_argument("run_zeroth_order: radius must be positive");
  }
  if (oracle.dim() != geometry.dim()) {
    throw std::invalid_argument(
        "run_zeroth_order: oracle/geometry dimension mismatch");
  }
  const FeedbackKind kind = smoothing.kind;
  if (kind == FeedbackKind::directional && !oracle.has_gradient()) {
    throw std::invalid_argument(
        "run_zeroth_order: directional feedback needs a gradient oracle");
  }
  if ((kind == FeedbackKind::one_point || kind == FeedbackKind::two_point) &&
      !(smoothing.tau1 > 0.0)) {
    throw std::invalid_argument("run_zeroth_order: smoothing radius not set");
  }
  if (kind == FeedbackKind::double_smoothed &&
      !(smoothing.tau1 >= smoothing.tau2 && smoothing.tau2 > 0.0)) {
    throw std::invalid_argument(
        "run_zeroth_order: double smoothing needs tau1 >= tau2 > 0");
  }

  auto t0 = Clock::now();
  RunRecord record;
  Rng rng(config.seed);
  const std::size_t n = geometry.dim();
  const long N = config.iterations;
  const double m_est =
      std::sqrt(surrogate_second_moment(oracle, smoothing, geometry.q()));
  const double h =
      config.radius / m_est * std::sqrt(2.0 / static_cast<double>(N));

  if (smoothing.delta_max && oracle.bias_level() > *smoothing.delta_max) {
    record.warnings.push_back(
        "adversarial noise level exceeds the admissible bound for this "
        "smoothing schedule; the accuracy target may be missed");
  }

  std::vector<double> x;
  if (config.start) {
    geometry.require_feasible(*config.start, "run_zeroth_order");
    x = *config.start;
  } else {
    x = geometry.start_point();
  }

  Averager avg(n);
  for (long k = 0; k < N; ++k) {
    avg.add(x);
    maybe_trace(record, oracle, config, k, x, avg);
    std::vector<double> g;
    switch (kind) {
      case FeedbackKind::one_point: {
        std::vector<double> e = sample_sphere(n, rng);
        g = one_point_gradient(oracle, x, smoothing.tau1, e, rng);
        record.oracle_calls += 1;
        break;
      }
      case FeedbackKind::two_point: {
        std::vector<double> e = sample_sphere(n, rng);
        g = two_point_gradient(oracle, x, smoothing.tau1, e, rng);
        record.oracle_calls += 2;
        break;
      }
      case FeedbackKind::directional: {
        std::vector<double> e = sample_sphere(n, rng);
        g = directional_gradient(oracle, x, e, rng);
        record.oracle_calls += 1;
        break;
      }
      case FeedbackKind::double_smoothed: {
        std::vector<double> e1 = sample_ball(n, rng);
        std::vector<double> e2 = sample_sphere(n, rng);
        g = double_smoothed_gradient(oracle, x, smoothing.tau1, smoothing.tau2,
                                     e1, e2, rng, config.second_probe);
        record.oracle_calls += 2;
        break;
      }
    }
    for (double c : g) {
      if (std::isnan(c)) {
        throw std::runtime_error("run_zeroth_order: estimator returned NaN at step " +
                                 std::to_string(k));
      }
    }
    x = geometry.mirror_step(x, g, h);
  }

  record.average = avg.mean();
  auto value = oracle.objective(record.average);
  auto best = oracle.optimum();
  if (value && best) record.final_gap = *value - *best;
  record.wall_seconds = seconds_since(t0);
  return record;
}

}  // namespace smdkit
