#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smdkit/problems.hpp"
#include "smdkit/prox.hpp"
#include "smdkit/smd.hpp"
#include "smdkit/zeroth_order.hpp"
#include "test_util.hpp"

using namespace smdkit;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

/* Forwarding oracle that counts value/gradient invocations. */
class CountingOracle : public ValueOracle {
 public:
  explicit CountingOracle(const ValueOracle& inner) : inner_(inner) {}

  std::size_t dim() const override { return inner_.dim(); }
  double value(std::span<const double> x, Rng& rng) const override {
    ++value_calls;
    return inner_.value(x, rng);
  }
  bool has_gradient() const override { return inner_.has_gradient(); }
  std::vector<double> grad(std::span<const double> x, Rng& rng) const override {
    ++grad_calls;
    return inner_.grad(x, rng);
  }
  double bias_level() const override { return inner_.bias_level(); }
  double value_bound() const override { return inner_.value_bound(); }
  double lipschitz() const override { return inner_.lipschitz(); }
  std::optional<double> gradient_lipschitz() const override {
    return inner_.gradient_lipschitz();
  }
  std::optional<double> objective(std::span<const double> x) const override {
    return inner_.objective(x);
  }
  std::optional<double> optimum() const override { return inner_.optimum(); }

  mutable long value_calls = 0;
  mutable long grad_calls = 0;

 private:
  const ValueOracle& inner_;
};

/* Oracle whose domain is a small ball around the simplex center. */
class CrampedOracle : public ValueOracle {
 public:
  std::size_t dim() const override { return 2; }
  double value(std::span<const double> x, Rng&) const override {
    return x[0];
  }
  bool in_domain(std::span<const double> x) const override {
    double d0 = x[0] - 0.5;
    double d1 = x[1] - 0.5;
    return d0 * d0 + d1 * d1 <= 0.25;
  }
  double value_bound() const override { return 1.0; }
  double lipschitz() const override { return 1.0; }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("sphere samples are unit vectors, ball samples interior") {
  Rng rng(31);
  for (std::size_t n : {1u, 2u, 10u}) {
    for (int t = 0; t < 100; ++t) {
      std::vector<double> e = sample_sphere(n, rng);
      double norm2 = dot(e, e);
      CHECK(std::abs(norm2 - 1.0) < 1e-12);
      std::vector<double> b = sample_ball(n, rng);
      CHECK(dot(b, b) <= 1.0 + 1e-12);
    }
  }
  /* n = 1 degenerates to a fair sign. */
  int plus = 0;
  for (int t = 0; t < 10000; ++t) {
    if (sample_sphere(1, rng)[0] > 0.0) ++plus;
  }
  CHECK(std::abs(plus / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("ball samples have the radial second moment n/(n+2)") {
  Rng rng(32);
  const int draws = 20000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    std::vector<double> b = sample_ball(2, rng);
    sum += dot(b, b);
  }
  /* For n = 2 the squared radius is uniform on [0, 1]. */
  CHECK(std::abs(sum / draws - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / draws));
}

TEST_CASE("moment factors at pinned arguments") {
  CHECK(sphere_norm_factor(10, 2.0) == doctest::Approx(1.0));
  CHECK(sphere_norm_factor(100, kInf) ==
        doctest::Approx((16.0 * std::log(100.0) - 8.0) / 100.0).epsilon(1e-12));
  /* Small n drives the logarithmic expression nonpositive; the sure bound
   * ||e||_q <= 1 takes over. */
  CHECK(sphere_norm_factor(1, kInf) == doctest::Approx(1.0));
  CHECK(sphere_norm_factor(2, kInf) == doctest::Approx(1.0));

  CHECK(sphere_alignment_factor(4) == doctest::Approx(0.25));

  CHECK(sphere_cross_factor(2, 2.0) == doctest::Approx(0.5));  /* capped at 1/n */
  CHECK(sphere_cross_factor(10, kInf) == doctest::Approx(0.1));
  CHECK(sphere_cross_factor(1000, kInf) ==
        doctest::Approx(std::sqrt(3.0) * (32.0 * std::log(1000.0) - 8.0) /
                        (1000.0 * 1000.0))
            .epsilon(1e-12));
}

TEST_CASE("empirical sphere moments sit under the declared bounds") {
  std::vector<double> c{0.3, -0.9, 0.4, 1.2, -0.5, 0.1, 0.8, -1.1, 0.2, 0.6};
  double c2 = dot(c, c);
  for (std::size_t n : {10u, 100u}) {
    Rng rng(33);
    const int draws = 20000;
    double sum_inf = 0.0, sum_align = 0.0, sum_cross = 0.0;
    for (int t = 0; t < draws; ++t) {
      std::vector<double> e = sample_sphere(n, rng);
      double m = 0.0;
      for (double v : e) m = std::max(m, std::abs(v));
      double a = 0.0;
      for (std::size_t i = 0; i < std::min<std::size_t>(10, n); ++i) {
        a += c[i] * e[i];
      }
      sum_inf += m * m;
      sum_align += a * a;
      sum_cross += a * a * m * m;
    }
    /* Raw logarithmic bounds, before the sure-bound caps. */
    double raw_norm = (16.0 * std::log(double(n)) - 8.0) / double(n);
    double raw_cross = std::sqrt(3.0) * (32.0 * std::log(double(n)) - 8.0) /
                       (double(n) * double(n));
    CHECK(sum_inf / draws <= raw_norm);
    CHECK(sum_cross / draws <= raw_cross * c2);
    /* Alignment is an identity: E<c,e>^2 = ||c||^2 / n. */
    double se = 3.0 * c2 / std::sqrt(double(draws));
    CHECK(std::abs(sum_align / draws - c2 / double(n)) <= se);
  }
}

TEST_CASE("two-point and directional estimates coincide on linear objectives") {
  std::vector<double> c{0.3, -0.7, 0.2};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.0,
                                0.0, 0.0, 1.0, 1.0, std::nullopt);
  Rng rng(34);
  std::vector<double> x{0.1, 0.2, 0.7};
  for (int t = 0; t < 20; ++t) {
    std::vector<double> e = sample_sphere(3, rng);
    std::vector<double> g2 = two_point_gradient(problem, x, 0.37, e, rng);
    std::vector<double> gd = directional_gradient(problem, x, e, rng);
    CHECK(testutil::linf(g2, gd) < 1e-9);
    /* Both equal n <c, e> e. */
    double want = 3.0 * dot(c, e);
    for (int i = 0; i < 3; ++i) {
      CHECK(gd[i] == doctest::Approx(want * e[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-point differences cancel shared additive noise exactly") {
  std::vector<double> c{0.3, -0.7, 0.2};
  SyntheticValueProblem noisy(SyntheticValueProblem::Shape::linear, c, 50.0,
                              0.0, 0.0, 60.0, 1.0, std::nullopt);
  Rng rng(35);
  std::vector<double> x{0.1, 0.2, 0.7};
  for (int t = 0; t < 20; ++t) {
    std::vector<double> e = sample_sphere(3, rng);
    std::vector<double> g = two_point_gradient(noisy, x, 0.37, e, rng);
    double want = 3.0 * dot(c, e);
    for (int i = 0; i < 3; ++i) {
      CHECK(g[i] == doctest::Approx(want * e[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("two-point estimate on a quadratic carries the curvature term") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.0, 0.0, 0.0, 1.0, 1.5, 1.0);
  Rng rng(36);
  std::vector<double> x{0.25, 0.25, 0.25, 0.25};
  double tau = 0.2;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> e = sample_sphere(4, rng);
    std::vector<double> g = two_point_gradient(problem, x, tau, e, rng);
    std::vector<double> xc(4);
    for (int i = 0; i < 4; ++i) xc[i] = x[i] - c[i];
    double want = 4.0 * (dot(xc, e) + 0.5 * tau);
    for (int i = 0; i < 4; ++i) {
      CHECK(g[i] == doctest::Approx(want * e[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("matched double smoothing cancels the outer offset on linear objectives") {
  std::vector<double> c{0.3, -0.7, 0.2};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.0,
                                0.0, 0.0, 1.0, 1.0, std::nullopt);
  Rng rng(37);
  std::vector<double> x{0.1, 0.2, 0.7};
  double tau1 = 0.2, tau2 = 0.05;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> e1 = sample_ball(3, rng);
    std::vector<double> e2 = sample_sphere(3, rng);
    std::vector<double> gm = double_smoothed_gradient(
        problem, x, tau1, tau2, e1, e2, rng, SecondProbe::matched);
    double want = 3.0 * dot(c, e2);
    for (int i = 0; i < 3; ++i) {
      CHECK(gm[i] == doctest::Approx(want * e2[i]).epsilon(1e-10));
    }
    /* The rescaled probe keeps a tau1 - tau2 leftover of the inner offset. */
    std::vector<double> gr = double_smoothed_gradient(
        problem, x, tau1, tau2, e1, e2, rng, SecondProbe::rescaled);
    double leftover = (tau1 - tau2) / tau2 * dot(c, e1);
    for (int i = 0; i < 3; ++i) {
      CHECK(gr[i] ==
            doctest::Approx((want + 3.0 * leftover) * e2[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("directional estimates are unbiased for the true gradient") {
  for (std::size_t n : {2u, 10u}) {
    std::vector<double> c(n);
    Rng crng(38);
    for (double& v : c) v = crng.uniform(-1.0, 1.0);
    SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.0,
                                  0.0, 0.0, 2.0, 2.0, std::nullopt);
    std::vector<double> x(n, 1.0 / double(n));
    Rng rng(39);
    const int draws = 20000;
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    for (int t = 0; t < draws; ++t) {
      std::vector<double> e = sample_sphere(n, rng);
      std::vector<double> g = directional_gradient(problem, x, e, rng);
      for (std::size_t i = 0; i < n; ++i) {
        sum[i] += g[i];
        sumsq[i] += g[i] * g[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double m = sum[i] / draws;
      double var = sumsq[i] / draws - m * m;
      double se = std::sqrt(var / draws);
      CHECK(std::abs(m - c[i]) <= 3.0 * se + 1e-9);
    }
  }
}

TEST_CASE("one-point estimates are unbiased under value noise") {
  std::vector<double> c{0.5, -0.3, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.1,
                                0.0, 0.0, 1.0, 1.0, std::nullopt);
  std::vector<double> x{0.0, 0.0, 0.0};  /* zero offset keeps variance low */
  Rng rng(40);
  const double tau = 0.5;
  const int draws = 40000;
  std::vector<double> sum(3, 0.0), sumsq(3, 0.0);
  for (int t = 0; t < draws; ++t) {
    std::vector<double> e = sample_sphere(3, rng);
    std::vector<double> g = one_point_gradient(problem, x, tau, e, rng);
    for (int i = 0; i < 3; ++i) {
      sum[i] += g[i];
      sumsq[i] += g[i] * g[i];
    }
  }
  for (int i = 0; i < 3; ++i) {
    double m = sum[i] / draws;
    double var = sumsq[i] / draws - m * m;
    double se = std::sqrt(var / draws);
    CHECK(std::abs(m - c[i]) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("smoothing schedules at pinned accuracies") {
  SmoothingParams two =
      choose_smoothing_params(0.1, 1.0, 1.0, 1.0, 1, FeedbackKind::two_point);
  CHECK(two.tau1 == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));
  REQUIRE(two.delta_max.has_value());
  CHECK(*two.delta_max ==
        doctest::Approx(std::pow(0.1, 1.5) / 16.0).epsilon(1e-12));

  SmoothingParams dbl = choose_smoothing_params(0.1, 1.0, std::nullopt, 1.0, 4,
                                                FeedbackKind::double_smoothed);
  CHECK(dbl.tau1 == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(dbl.tau2 == doctest::Approx(0.00625).epsilon(1e-12));
  REQUIRE(dbl.delta_max.has_value());
  CHECK(*dbl.delta_max == doctest::Approx(0.01 / 448.0).epsilon(1e-12));

  SmoothingParams one =
      choose_smoothing_params(0.1, 1.0, std::nullopt, 1.0, 3,
                              FeedbackKind::one_point);
  CHECK(one.tau1 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_FALSE(one.delta_max.has_value());

  SmoothingParams dir = choose_smoothing_params(
      0.1, 1.0, std::nullopt, 1.0, 3, FeedbackKind::directional);
  CHECK(dir.tau1 == 0.0);
  CHECK(dir.tau2 == 0.0);

  CHECK_THROWS_AS((void)choose_smoothing_params(0.1, 1.0, std::nullopt, 1.0, 4,
                                                FeedbackKind::two_point),
                  std::invalid_argument);
}

TEST_CASE("surrogate second moments at pinned oracles") {
  /* Nonsmooth 10-dimensional oracle with M2 = 1 under the sup norm. */
  SyntheticValueProblem nonsmooth(SyntheticValueProblem::Shape::norm,
                                  std::vector<double>(10, 0.0), 0.0, 0.0, 0.0,
                                  1.0, 1.0, std::nullopt);
  SmoothingParams sp;
  sp.kind = FeedbackKind::directional;
  CHECK(surrogate_second_moment(nonsmooth, sp, kInf) ==
        doctest::Approx(10.0).epsilon(1e-12));

  sp.kind = FeedbackKind::two_point;
  sp.tau1 = 0.1;
  CHECK(surrogate_second_moment(nonsmooth, sp, kInf) ==
        doctest::Approx(200.0).epsilon(1e-12));

  sp.kind = FeedbackKind::one_point;
  sp.tau1 = 0.5;
  /* (n B / tau)^2 S with B = 1, S capped at 1. */
  CHECK(surrogate_second_moment(nonsmooth, sp, kInf) ==
        doctest::Approx(400.0).epsilon(1e-12));

  sp.kind = FeedbackKind::two_point;
  sp.tau1 = 0.0;
  CHECK_THROWS_AS((void)surrogate_second_moment(nonsmooth, sp, kInf),
                  std::invalid_argument);
}

TEST_CASE("the surrogate moment bound covers the empirical second moment") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.0, 0.0, 0.0, 1.0, 1.5, 1.0);
  SmoothingParams sp = choose_smoothing_params(0.1, 1.5, 1.0, 1.0, 4,
                                               FeedbackKind::two_point);
  double bound = surrogate_second_moment(problem, sp, kInf);
  Rng rng(41);
  std::vector<double> x{0.25, 0.25, 0.25, 0.25};
  const int draws = 4000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    std::vector<double> e = sample_sphere(4, rng);
    std::vector<double> g = two_point_gradient(problem, x, sp.tau1, e, rng);
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    sum += m * m;
  }
  CHECK(sum / draws <= bound);
}

TEST_CASE("runner accounts one or two oracle calls per step by feedback kind") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem inner(SyntheticValueProblem::Shape::quadratic, c, 0.0,
                              0.0, 0.0, 1.0, 1.5, 1.0);
  ProxGeometry geometry(ProxKind::entropic_simplex, 4);
  ZeroOrderConfig config;
  config.iterations = 50;
  config.radius = 1.0;

  SmoothingParams sp = choose_smoothing_params(0.2, 1.5, 1.0, 1.0, 4,
                                               FeedbackKind::two_point);
  CountingOracle counted(inner);
  RunRecord two = run_zeroth_order(counted, geometry, config, sp);
  CHECK(two.oracle_calls == 100);
  CHECK(counted.value_calls == 100);

  sp = choose_smoothing_params(0.2, 1.5, std::nullopt, 1.0, 4,
                               FeedbackKind::one_point);
  CountingOracle counted1(inner);
  RunRecord one = run_zeroth_order(counted1, geometry, config, sp);
  CHECK(one.oracle_calls == 50);
  CHECK(counted1.value_calls == 50);

  sp = choose_smoothing_params(0.2, 1.5, std::nullopt, 1.0, 4,
                               FeedbackKind::directional);
  CountingOracle counted_d(inner);
  RunRecord dir = run_zeroth_order(counted_d, geometry, config, sp);
  CHECK(dir.oracle_calls == 50);
  CHECK(counted_d.grad_calls == 50);
  CHECK(counted_d.value_calls == 0);

  sp = choose_smoothing_params(0.2, 1.5, std::nullopt, 1.0, 4,
                               FeedbackKind::double_smoothed);
  CountingOracle counted_ds(inner);
  RunRecord ds = run_zeroth_order(counted_ds, geometry, config, sp);
  CHECK(ds.oracle_calls == 100);
  CHECK(counted_ds.value_calls == 100);
}

TEST_CASE("two-point runner reaches its accuracy target within budget") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.05, 0.0, 0.0, 1.0, 1.5, 1.0);
  ProxGeometry geometry(ProxKind::entropic_simplex, 4);
  const double eps = 0.1;
  const double radius = std::sqrt(std::log(4.0));
  SmoothingParams sp = choose_smoothing_params(eps, 1.5, 1.0, radius, 4,
                                               FeedbackKind::two_point);
  double m_est = std::sqrt(surrogate_second_moment(problem, sp, geometry.q()));
  ZeroOrderConfig config;
  config.iterations = required_iterations(m_est, radius, eps);
  config.radius = radius;
  config.seed = 7;
  RunRecord record = run_zeroth_order(problem, geometry, config, sp);
  REQUIRE(record.final_gap.has_value());
  CHECK(*record.final_gap <= eps);
}

TEST_CASE("one-point budgets dominate two-point budgets at equal accuracy") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.0, 0.0, 0.0, 1.0, 1.5, 1.0);
  const double eps = 0.1;
  const double radius = std::sqrt(std::log(4.0));
  SmoothingParams two = choose_smoothing_params(eps, 1.5, 1.0, radius, 4,
                                                FeedbackKind::two_point);
  SmoothingParams one = choose_smoothing_params(eps, 1.5, std::nullopt, radius,
                                                4, FeedbackKind::one_point);
  double m_two = std::sqrt(surrogate_second_moment(problem, two, kInf));
  double m_one = std::sqrt(surrogate_second_moment(problem, one, kInf));
  long calls_two = 2 * required_iterations(m_two, radius, eps);
  long calls_one = required_iterations(m_one, radius, eps);
  CHECK(calls_one > calls_two);
}

TEST_CASE("directional runner matches first-order descent on a linear objective") {
  std::vector<double> c{0.5, 0.3, 0.0};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.0,
                                0.0, 0.0, 1.0, 0.6, std::nullopt);
  problem.set_optimum_hint(0.0);  /* min over the simplex sits at vertex 2 */
  ProxGeometry geometry(ProxKind::entropic_simplex, 3);
  ZeroOrderConfig config;
  config.iterations = 2000;
  config.radius = std::sqrt(std::log(3.0));
  config.seed = 3;
  SmoothingParams sp = choose_smoothing_params(
      0.05, 0.6, std::nullopt, config.radius, 3, FeedbackKind::directional);
  RunRecord record = run_zeroth_order(problem, geometry, config, sp);
  CHECK(record.average[2] >= 0.9);

  SimplexLinearProblem reference(c, NoiseModel::bounded, 0.0, 0.5);
  SolverConfig ref_config;
  ref_config.iterations = 2000;
  ref_config.radius = config.radius;
  RunRecord ref = run_smd(reference, geometry, ref_config);
  CHECK(ref.average[2] >= 0.9);
}

TEST_CASE("excess adversarial noise is reported, not silently absorbed") {
  std::vector<double> c{0.5, 0.5};
  SyntheticValueProblem corrupted(SyntheticValueProblem::Shape::quadratic, c,
                                  0.0, 1.0, 0.1, 2.0, 1.0, 1.0);
  ProxGeometry geometry(ProxKind::entropic_simplex, 2);
  ZeroOrderConfig config;
  config.iterations = 5;
  config.radius = 1.0;
  SmoothingParams sp = choose_smoothing_params(0.1, 1.0, 1.0, 1.0, 2,
                                               FeedbackKind::two_point);
  RunRecord record = run_zeroth_order(corrupted, geometry, config, sp);
  CHECK_FALSE(record.warnings.empty());
}

TEST_CASE("probes leaving the declared domain abort the run") {
  CrampedOracle oracle;
  ProxGeometry geometry(ProxKind::entropic_simplex, 2);
  ZeroOrderConfig config;
  config.iterations = 10;
  config.radius = 1.0;
  SmoothingParams sp;
  sp.kind = FeedbackKind::one_point;
  sp.tau1 = 1.0;
  CHECK_THROWS_AS((void)run_zeroth_order(oracle, geometry, config, sp),
                  std::domain_error);
}

TEST_CASE("runner replays bit for bit and validates its configuration") {
  std::vector<double> c{0.4, 0.3, 0.2, 0.1};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::quadratic, c,
                                0.05, 0.0, 0.0, 1.0, 1.5, 1.0);
  ProxGeometry geometry(ProxKind::entropic_simplex, 4);
  ZeroOrderConfig config;
  config.iterations = 200;
  config.radius = 1.0;
  config.seed = 12;
  SmoothingParams sp = choose_smoothing_params(0.2, 1.5, 1.0, 1.0, 4,
                                               FeedbackKind::two_point);
  RunRecord a = run_zeroth_order(problem, geometry, config, sp);
  RunRecord b = run_zeroth_order(problem, geometry, config, sp);
  CHECK(a.average == b.average);

  /* Second-probe placement changes the trajectory. */
  SmoothingParams ds = choose_smoothing_params(0.2, 1.5, std::nullopt, 1.0, 4,
                                               FeedbackKind::double_smoothed);
  RunRecord matched = run_zeroth_order(problem, geometry, config, ds);
  ZeroOrderConfig rescaled_config = config;
  rescaled_config.second_probe = SecondProbe::rescaled;
  RunRecord rescaled = run_zeroth_order(problem, geometry, rescaled_config, ds);
  CHECK(testutil::linf(matched.average, rescaled.average) > 0.0);

  ZeroOrderConfig bad = config;
  bad.iterations = 0;
  CHECK_THROWS_AS((void)run_zeroth_order(problem, geometry, bad, sp),
                  std::invalid_argument);
  SmoothingParams no_tau;
  no_tau.kind = FeedbackKind::two_point;
  CHECK_THROWS_AS((void)run_zeroth_order(problem, geometry, config, no_tau),
                  std::invalid_argument);
  SmoothingParams bad_ds;
  bad_ds.kind = FeedbackKind::double_smoothed;
  bad_ds.tau1 = 0.01;
  bad_ds.tau2 = 0.02;  /* inner radius must dominate the outer one */
  CHECK_THROWS_AS((void)run_zeroth_order(problem, geometry, config, bad_ds),
                  std::invalid_argument);
}

TEST_CASE("estimator argument validation") {
  std::vector<double> c{0.5, 0.5};
  SyntheticValueProblem problem(SyntheticValueProblem::Shape::linear, c, 0.0,
                                0.0, 0.0, 1.0, 1.0, std::nullopt);
  Rng rng(42);
  std::vector<double> x{0.5, 0.5};
  std::vector<double> e = sample_sphere(2, rng);
  CHECK_THROWS_AS((void)one_point_gradient(problem, x, 0.0, e, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)two_point_gradient(problem, x, -1.0, e, rng),
                  std::invalid_argument);
  std::vector<double> short_e{1.0};
  CHECK_THROWS_AS((void)two_point_gradient(problem, x, 0.1, short_e, rng),
                  std::invalid_argument);

  CrampedOracle no_grad;
  std::vector<double> center{0.5, 0.5};
  CHECK_THROWS_AS((void)directional_gradient(no_grad, center, e, rng),
                  std::invalid_argument);
}
