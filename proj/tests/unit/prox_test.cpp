#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smdkit/prox.hpp"
#include "smdkit/rng.hpp"
#include "test_util.hpp"

using smdkit::ProxGeometry;
using smdkit::ProxKind;
using smdkit::Rng;

namespace {

/* Independent projection oracle: the Euclidean projection onto the simplex
 * has the form max(y_i - theta, 0) with support set S; enumerate every
 * candidate support and keep the feasible candidate of least distance. */
std::vector<double> brute_force_projection(const std::vector<double>& y) {
  const std::size_t n = y.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_z;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sum += y[i];
        ++k;
      }
    }
    double theta = (sum - 1.0) / k;
    std::vector<double> z(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        z[i] = y[i] - theta;
        if (z[i] < 0.0) feasible = false;
      }
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += (z[i] - y[i]) * (z[i] - y[i]);
    if (obj < best) {
      best = obj;
      best_z = std::move(z);
    }
  }
  return best_z;
}

double norm_p(std::span<const double> x, std::span<const double> y, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += std::pow(std::abs(x[i] - y[i]), p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace

TEST_CASE("prox values at pinned points") {
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  CHECK(ent.prox_value(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(ent.prox_value(std::vector<double>{1.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  ProxGeometry free(ProxKind::euclidean_free, 2);
  CHECK(free.prox_value(std::vector<double>{3.0, 4.0}) == doctest::Approx(12.5));

  ProxGeometry eus(ProxKind::euclidean_simplex, 2);
  CHECK(eus.prox_value(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.25));
  CHECK(eus.prox_value(eus.start_point()) == doctest::Approx(0.0));
}

TEST_CASE("bregman divergence at pinned points") {
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  std::vector<double> u{0.5, 0.5};
  CHECK(ent.bregman(u, u) == doctest::Approx(0.0));
  std::vector<double> y{0.25, 0.75};
  CHECK(ent.bregman(u, y) ==
        doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));

  ProxGeometry free(ProxKind::euclidean_free, 2);
  CHECK(free.bregman(std::vector<double>{1.0, 0.0},
                     std::vector<double>{0.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("entropic bregman rejects zero reference coordinates") {
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  std::vector<double> x{0.5, 0.5};
  std::vector<double> y{1.0, 0.0};
  CHECK_THROWS_AS((void)ent.bregman(x, y), std::domain_error);
}

TEST_CASE("mirror step closed forms") {
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  std::vector<double> z =
      ent.mirror_step(std::vector<double>{0.5, 0.5},
                      std::vector<double>{1.0, -1.0}, std::log(2.0));
  CHECK(z[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(0.8).epsilon(1e-12));

  ProxGeometry free(ProxKind::euclidean_free, 2);
  std::vector<double> w = free.mirror_step(std::vector<double>{1.0, 1.0},
                                           std::vector<double>{1.0, 0.0}, 0.5);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(1.0));

  ProxGeometry eus(ProxKind::euclidean_simplex, 2);
  std::vector<double> v = eus.mirror_step(std::vector<double>{0.5, 0.5},
                                          std::vector<double>{1.0, 0.0}, 1.0);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(1.0));
}

TEST_CASE("zero gradient leaves the point fixed") {
  ProxGeometry ent(ProxKind::entropic_simplex, 3);
  std::vector<double> x{0.2, 0.3, 0.5};
  std::vector<double> z = ent.mirror_step(x, std::vector<double>{0, 0, 0}, 1.0);
  for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-15));
}

TEST_CASE("entropic step ignores constant shifts of the gradient") {
  Rng rng(11);
  ProxGeometry ent(ProxKind::entropic_simplex, 5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x = testutil::random_simplex_point(5, rng);
    std::vector<double> v(5), v_shift(5);
    double c = rng.uniform(-7.0, 7.0);
    for (int i = 0; i < 5; ++i) {
      v[i] = rng.uniform(-3.0, 3.0);
      v_shift[i] = v[i] + c;
    }
    double h = rng.uniform(0.01, 2.0);
    std::vector<double> a = ent.mirror_step(x, v, h);
    std::vector<double> b = ent.mirror_step(x, v_shift, h);
    CHECK(testutil::linf(a, b) < 1e-12);
  }
}

TEST_CASE("divergence dominates half the squared p-norm") {
  Rng rng(12);
  ProxGeometry ent(ProxKind::entropic_simplex, 4);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = testutil::random_simplex_point(4, rng);
    std::vector<double> y = testutil::random_simplex_point(4, rng);
    double d1 = norm_p(x, y, 1.0);
    CHECK(ent.bregman(x, y) >= 0.5 * d1 * d1 - 1e-9);
  }
  ProxGeometry eus(ProxKind::euclidean_simplex, 4);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = testutil::random_simplex_point(4, rng);
    std::vector<double> y = testutil::random_simplex_point(4, rng);
    double d2 = norm_p(x, y, 2.0);
    CHECK(eus.bregman(x, y) >= 0.5 * d2 * d2 - 1e-9);
  }
}

TEST_CASE("mirror steps stay feasible under heavy fuzzing") {
  Rng rng(13);
  const struct {
    ProxKind kind;
    std::size_t n;
    int draws;
  } plans[] = {
      {ProxKind::entropic_simplex, 2, 25000},
      {ProxKind::entropic_simplex, 7, 25000},
      {ProxKind::euclidean_simplex, 7, 25000},
      {ProxKind::euclidean_simplex, 3, 25000},
  };
  for (const auto& plan : plans) {
    ProxGeometry geometry(plan.kind, plan.n);
    long failures = 0;
    for (int t = 0; t < plan.draws; ++t) {
      std::vector<double> x = testutil::random_simplex_point(plan.n, rng);
      std::vector<double> v(plan.n);
      for (double& c : v) c = rng.uniform(-50.0, 50.0);
      double h = rng.uniform(1e-3, 10.0);
      std::vector<double> z = geometry.mirror_step(x, v, h);
      if (!geometry.contains(z)) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("entropic step survives extreme corner cases") {
  /* Vertex start: zero coordinates stay zero; huge steps stay finite. */
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  std::vector<double> vertex{1.0, 0.0};
  std::vector<double> z =
      ent.mirror_step(vertex, std::vector<double>{5.0, -5.0}, 100.0);
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == doctest::Approx(0.0));
  std::vector<double> big =
      ent.mirror_step(std::vector<double>{0.5, 0.5},
                      std::vector<double>{1e6, -1e6}, 10.0);
  CHECK(ent.contains(big));
  CHECK(big[1] == doctest::Approx(1.0));
}

TEST_CASE("projection matches the enumerated optimum") {
  Rng rng(14);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int t = 0; t < 50; ++t) {
      std::vector<double> y(n);
      for (double& c : y) c = rng.uniform(-2.0, 2.0);
      std::vector<double> got = smdkit::project_to_simplex(y);
      std::vector<double> want = brute_force_projection(y);
      CHECK(testutil::linf(got, want) < 1e-9);
    }
  }
  /* Feasible inputs are fixed points. */
  std::vector<double> x{0.1, 0.2, 0.7};
  std::vector<double> z = smdkit::project_to_simplex(x);
  CHECK(testutil::linf(x, z) < 1e-12);
}

TEST_CASE("feasibility checks reject malformed points") {
  ProxGeometry ent(ProxKind::entropic_simplex, 2);
  CHECK_FALSE(ent.contains(std::vector<double>{0.7, 0.7}));
  CHECK_FALSE(ent.contains(std::vector<double>{1.5, -0.5}));
  CHECK_FALSE(ent.contains(std::vector<double>{1.0}));
  CHECK(ent.contains(std::vector<double>{1.0, 0.0}));
  CHECK_THROWS_AS(
      ent.require_feasible(std::vector<double>{0.7, 0.7}, "test"),
      std::domain_error);
  CHECK_THROWS_AS(
      (void)ent.mirror_step(std::vector<double>{0.7, 0.7},
                            std::vector<double>{0.0, 0.0}, 1.0),
      std::domain_error);
  CHECK_THROWS_AS(
      (void)ent.mirror_step(std::vector<double>{0.5, 0.5},
                            std::vector<double>{0.0, 0.0}, 0.0),
      std::invalid_argument);

  ProxGeometry free(ProxKind::euclidean_free, 2);
  CHECK(free.contains(std::vector<double>{-3.0, 9.0}));
  double inf = std::numeric_limits<double>::infinity();
  CHECK_FALSE(free.contains(std::vector<double>{inf, 0.0}));
}

TEST_CASE("geometries report their norm exponents and starts") {
  ProxGeometry ent(ProxKind::entropic_simplex, 4);
  CHECK(ent.p() == 1.0);
  CHECK(std::isinf(ent.q()));
  CHECK(ent.start_point() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(ent.prox_value(ent.start_point()) == doctest::Approx(0.0));

  ProxGeometry free(ProxKind::euclidean_free, 3);
  CHECK(free.p() == 2.0);
  CHECK(free.q() == 2.0);
  CHECK(free.start_point() == std::vector<double>{0.0, 0.0, 0.0});
}
