#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smdkit/rng.hpp"

namespace smdkit {

/* Online linear play on the simplex: at each round the learner commits a
 * distribution x^k over n actions, an adversary reveals a loss vector l^k
 * with ||l^k||_inf <= M, and the learner pays <l^k, x^k> (expected mode) or
 * the loss of one sampled action (sampled mode). */

/* Loss source. next() may inspect every *past* sampled action but never the
 * current one; a bet is sampled each round in both play modes so the
 * adversary's information set does not depend on the mode. */
class LossStream {
 public:
  virtual ~LossStream() = default;

  virtual std::size_t dim() const = 0;
  virtual double loss_bound() const = 0;  /* M */
  virtual std::vector<double> next(long step,
                                   std::span<const std::size_t> past_bets,
                                   Rng& rng) = 0;
};

enum class PlayMode { expected, sampled };

struct RegretRecord {
  std::vector<std::vector<double>> losses;  /* l^1 ... l^N */
  std::vector<std::vector<double>> plays;   /* x^1 ... x^N */
  std::vector<std::size_t> bets;            /* sampled action per round */
  /* Time-averaged regret after each round t:
   * (1/t) sum_{k<=t} paid_k  -  min_i (1/t) sum_{k<=t} l_i^k. */
  std::vector<double> regret_trace;
  std::optional<double> final_regret;       /* empty when N = 0 */
  double bound = 0.0;                       /* M sqrt(2 ln n / N) */
  long rounds = 0;
};

/* Multiplicative-weights update z_i proportional to x_i exp(-h l_i).
 * Delegates to the entropic mirror step, so the two trajectories agree
 * bit-for-bit. */
std::vector<double> exp_weights_step(std::span<const double> x,
                                     std::span<const double> l, double h);

/* Vertex index distributed as x, by inverse CDF in coordinate order. */
std::size_t sample_action(std::span<const double> x, Rng& rng);

/* Exp-weights over N rounds with the horizon-tuned step
 * h = sqrt(2 ln n / N) / M. N = 0 yields an empty record (regret undefined).
 * A stream emitting a loss outside its declared bound aborts the game. */
RegretRecord run_exp_weights(LossStream& stream, std::size_t n, long rounds,
                             double loss_bound, PlayMode mode,
                             std::uint64_t seed);

/* Coin-guessing adversary over two actions: action 0 bets the outcome is +1,
 * action 1 bets -1. An outcome of +1 yields losses (-1, +1) (the correct
 * bet gains). Policies:
 *   scripted: replay a fixed +/-1 outcome sequence, cyclically; an empty
 *             script means the constant +1 outcome;
 *   majority: announce the outcome opposite to the learner's most frequent
 *             past bet (ties count as a bet on +1);
 *   coin:     i.i.d. fair coin. */
enum class CasinoPolicy { scripted, majority, coin };

class CasinoStream : public LossStream {
 public:
  explicit CasinoStream(CasinoPolicy policy, std::vector<int> script = {});

  std::size_t dim() const override { return 2; }
  double loss_bound() const override { return 1.0; }
  std::vector<double> next(long step, std::span<const std::size_t> past_bets,
                           Rng& rng) override;

  const std::vector<int>& outcomes() const { return outcomes_; }

 private:
  CasinoPolicy policy_;
  std::vector<int> script_;
  std::vector<int> outcomes_;  /* announced outcomes, in order */
};

/* Fraction of rounds whose sampled bet matched the announced outcome. */
double win_frequency(const RegretRecord& record);

}  // namespace smdkit
