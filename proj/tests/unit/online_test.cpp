#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smdkit/online.hpp"
#include "smdkit/prox.hpp"
#include "test_util.hpp"

using namespace smdkit;

namespace {

/* Stream that emits a fixed loss vector every round. */
class ConstantStream : public LossStream {
 public:
  explicit ConstantStream(std::vector<double> l) : l_(std::move(l)) {}
  std::size_t dim() const override { return l_.size(); }
  double loss_bound() const override { return 1.0; }
  std::vector<double> next(long, std::span<const std::size_t>, Rng&) override {
    return l_;
  }

 private:
  std::vector<double> l_;
};

/* Stream that breaks its own declared bound at a chosen round. */
class CheatingStream : public LossStream {
 public:
  std::size_t dim() const override { return 2; }
  double loss_bound() const override { return 1.0; }
  std::vector<double> next(long step, std::span<const std::size_t>,
                           Rng&) override {
    if (step == 3) return {2.0, 0.0};
    return {0.5, -0.5};
  }
};

}  // namespace

TEST_CASE("multiplicative weights agree with the entropic mirror step bit for bit") {
  Rng rng(51);
  ProxGeometry geometry(ProxKind::entropic_simplex, 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x = testutil::random_simplex_point(6, rng);
    std::vector<double> l(6);
    for (double& c : l) c = rng.uniform(-1.0, 1.0);
    double h = rng.uniform(0.01, 2.0);
    std::vector<double> a = exp_weights_step(x, l, h);
    std::vector<double> b = geometry.mirror_step(x, l, h);
    CHECK(a == b);
  }
}

TEST_CASE("action sampling follows the committed distribution") {
  Rng rng(52);
  std::vector<double> degenerate{0.0, 0.0, 1.0, 0.0};
  for (int t = 0; t < 200; ++t) {
    CHECK(sample_action(degenerate, rng) == 2);
  }

  std::vector<double> uniform(4, 0.25);
  std::vector<int> counts(4, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) counts[sample_action(uniform, rng)] += 1;
  for (int c : counts) CHECK(std::abs(double(c) / draws - 0.25) < 0.02);

  std::vector<double> skewed{0.1, 0.9};
  int ones = 0;
  for (int t = 0; t < draws; ++t) {
    if (sample_action(skewed, rng) == 1) ++ones;
  }
  CHECK(std::abs(double(ones) / draws - 0.9) < 0.02);

  std::vector<double> infeasible{0.7, 0.7};
  CHECK_THROWS_AS((void)sample_action(infeasible, rng), std::domain_error);
}

TEST_CASE("horizon-tuned bound at the pinned example") {
  ConstantStream stream({0.0, 0.0});
  RegretRecord record =
      run_exp_weights(stream, 2, 10000, 1.0, PlayMode::expected, 0);
  CHECK(record.bound ==
        doctest::Approx(std::sqrt(2.0 * std::log(2.0) / 10000.0))
            .epsilon(1e-12));
  CHECK(record.bound == doctest::Approx(0.011774100226).epsilon(1e-9));
}

TEST_CASE("constant losses drive the plays onto the best action") {
  /* Outcome +1 forever: betting on it (action 0) pays -1 each round. */
  CasinoStream stream(CasinoPolicy::scripted);
  RegretRecord record =
      run_exp_weights(stream, 2, 1000, 1.0, PlayMode::expected, 1);
  CHECK(record.plays.back()[0] >= 0.95);
  REQUIRE(record.final_regret.has_value());
  CHECK(*record.final_regret <= record.bound + 1e-12);
  CHECK(*record.final_regret >= 0.0);  /* cannot beat the constant best arm */
  CHECK(record.regret_trace.size() == 1000);
  CHECK(record.losses.size() == 1000);
  CHECK(record.bets.size() == 1000);
}

TEST_CASE("expected-mode regret never exceeds the bound, any policy, any horizon") {
  for (long N : {100L, 1000L, 10000L}) {
    CasinoStream heads(CasinoPolicy::scripted);
    CasinoStream alternating(CasinoPolicy::scripted, {1, -1});
    CasinoStream majority(CasinoPolicy::majority);
    CasinoStream coin(CasinoPolicy::coin);
    LossStream* streams[] = {&heads, &alternating, &majority, &coin};
    for (LossStream* stream : streams) {
      RegretRecord record =
          run_exp_weights(*stream, 2, N, 1.0, PlayMode::expected, 9);
      REQUIRE(record.final_regret.has_value());
      CHECK(*record.final_regret <= record.bound + 1e-12);
    }
  }
}

TEST_CASE("sampled-mode regret stays within the bound up to sampling error") {
  const long N = 1000;
  for (CasinoPolicy policy :
       {CasinoPolicy::scripted, CasinoPolicy::majority, CasinoPolicy::coin}) {
    std::vector<double> regrets;
    double bound = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      CasinoStream stream(policy);
      RegretRecord record =
          run_exp_weights(stream, 2, N, 1.0, PlayMode::sampled, seed);
      regrets.push_back(*record.final_regret);
      bound = record.bound;
    }
    double se = 1.0 / std::sqrt(double(N));
    CHECK(testutil::median(regrets) <= bound + 3.0 * se);
  }
}

TEST_CASE("the learner wins almost always against a constant casino") {
  CasinoStream stream(CasinoPolicy::scripted);  /* +1 forever */
  RegretRecord record =
      run_exp_weights(stream, 2, 2000, 1.0, PlayMode::sampled, 4);
  CHECK(win_frequency(record) >= 0.75);
  /* The mirrored script concentrates on the other action. */
  CasinoStream tails(CasinoPolicy::scripted, {-1});
  RegretRecord mirrored =
      run_exp_weights(tails, 2, 2000, 1.0, PlayMode::expected, 4);
  CHECK(mirrored.plays.back()[1] >= 0.95);
}

TEST_CASE("the majority casino keeps the win rate near a coin flip") {
  CasinoStream stream(CasinoPolicy::majority);
  RegretRecord record =
      run_exp_weights(stream, 2, 4000, 1.0, PlayMode::sampled, 6);
  CHECK(win_frequency(record) <= 0.6);
  CHECK(*record.final_regret <= record.bound + 3.0 / std::sqrt(4000.0));
  CHECK(record.plays.back()[0] > 0.0);
  CHECK(record.plays.back()[1] > 0.0);
}

TEST_CASE("negative regret is reported unclamped") {
  /* Alternating outcomes give both arms zero average loss, so a sampled run
   * that guesses better than chance pays less than the best fixed arm. Some
   * seed in a short scan must land there; the record must not clamp it. */
  bool saw_negative = false;
  for (std::uint64_t seed = 0; seed < 30 && !saw_negative; ++seed) {
    CasinoStream stream(CasinoPolicy::scripted, {1, -1});
    RegretRecord record =
        run_exp_weights(stream, 2, 100, 1.0, PlayMode::sampled, seed);
    if (*record.final_regret < 0.0) saw_negative = true;
  }
  CHECK(saw_negative);
}

TEST_CASE("an empty game yields an empty record") {
  ConstantStream stream({0.3, -0.3});
  RegretRecord record =
      run_exp_weights(stream, 2, 0, 1.0, PlayMode::expected, 0);
  CHECK_FALSE(record.final_regret.has_value());
  CHECK(record.rounds == 0);
  CHECK(record.losses.empty());
  CHECK(record.regret_trace.empty());
}

TEST_CASE("protocol violations abort the game") {
  CheatingStream cheat;
  CHECK_THROWS_AS(
      (void)run_exp_weights(cheat, 2, 10, 1.0, PlayMode::expected, 0),
      std::runtime_error);

  ConstantStream fine({0.5, -0.5});
  CHECK_THROWS_AS((void)run_exp_weights(fine, 1, 10, 1.0, PlayMode::expected, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_exp_weights(fine, 3, 10, 1.0, PlayMode::expected, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_exp_weights(fine, 2, -1, 1.0, PlayMode::expected, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_exp_weights(fine, 2, 10, 0.0, PlayMode::expected, 0),
      std::invalid_argument);
}

TEST_CASE("plays never hit the boundary under bounded losses") {
  CasinoStream stream(CasinoPolicy::scripted);
  RegretRecord record =
      run_exp_weights(stream, 2, 5000, 1.0, PlayMode::expected, 3);
  for (const auto& x : record.plays) {
    CHECK(x[0] > 0.0);
    CHECK(x[1] > 0.0);
  }
}

TEST_CASE("runs replay bit for bit at a fixed seed") {
  CasinoStream a(CasinoPolicy::coin);
  CasinoStream b(CasinoPolicy::coin);
  RegretRecord ra = run_exp_weights(a, 2, 500, 1.0, PlayMode::sampled, 11);
  RegretRecord rb = run_exp_weights(b, 2, 500, 1.0, PlayMode::sampled, 11);
  CHECK(ra.bets == rb.bets);
  CHECK(ra.losses == rb.losses);
  CHECK(ra.regret_trace == rb.regret_trace);
  CHECK(a.outcomes() == b.outcomes());
}

TEST_CASE("scripts must be signed unit outcomes") {
  CHECK_THROWS_AS(CasinoStream(CasinoPolicy::scripted, {1, 0, -1}),
                  std::invalid_argument);
}
