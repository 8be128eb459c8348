#include "smdkit/online.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "smdkit/prox.hpp"

namespace smdkit {

std::vector<double> exp_weights_step(std::span<const double> x,
                                     std::span<const double> l, double h) {
  ProxGeometry geometry(ProxKind::entropic_simplex, x.size());
  return geometry.mirror_step(x, l, h);
}

std::size_t sample_action(std::span<const double> x, Rng& rng) {
  ProxGeometry(ProxKind::entropic_simplex, x.size())
      .require_feasible(x, "sample_action");
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    cum += x[i];
    if (u < cum) return i;
  }
  return x.size() - 1;  /* absorbs rounding slack in the partial sums */
}

RegretRecord run_exp_weights(LossStream& stream, std::size_t n, long rounds,
                             double loss_bound, PlayMode mode,
                             std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("run_exp_weights: needs at least two actions");
  }
  if (rounds < 0) {
    throw std::invalid_argument("run_exp_weights: negative round count");
  }
  if (!(loss_bound > 0.0)) {
    throw std::invalid_argument("run_exp_weights: loss bound must be positive");
  }
  if (stream.dim() != n) {
    throw std::invalid_argument("run_exp_weights: stream/action-count mismatch");
  }

  RegretRecord record;
  record.rounds = rounds;
  if (rounds == 0) return record;  /* regret undefined on an empty game */

  const double nn = static_cast<double>(n);
  const double h =
      std::sqrt(2.0 * std::log(nn) / static_cast<double>(rounds)) / loss_bound;
  record.bound =
      loss_bound * std::sqrt(2.0 * std::log(nn) / static_cast<double>(rounds));

  Rng rng(seed);
  std::vector<double> x(n, 1.0 / nn);
  std::vector<double> loss_sums(n, 0.0);
  double paid = 0.0;

  for (long k = 0; k < rounds; ++k) {
    std::vector<double> l = stream.next(k, record.bets, rng);
    if (l.size() != n) {
      throw std::runtime_error("run_exp_weights: stream emitted " +
                               std::to_string(l.size()) +
                               " coordinates at round " + std::to_string(k));
    }
    for (double c : l) {
      if (!(std::abs(c) <= loss_bound * (1.0 + 1e-12))) {
        throw std::runtime_error(
            "run_exp_weights: stream violated its loss bound at round " +
            std::to_string(k));
      }
    }

    /* The bet is drawn after the adversary committed l^k, and only past bets
     * were visible to it. */
    std::size_t bet = sample_action(x, rng);
    record.plays.push_back(x);
    record.bets.push_back(bet);
    record.losses.push_back(l);

    if (mode == PlayMode::expected) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += l[i] * x[i];
      paid += dot;
    } else {
      paid += l[bet];
    }
    for (std::size_t i = 0; i < n; ++i) loss_sums[i] += l[i];

    double t = static_cast<double>(k + 1);
    double best = *std::min_element(loss_sums.begin(), loss_sums.end());
    record.regret_trace.push_back(paid / t - best / t);

    x = exp_weights_step(x, l, h);
  }

  record.final_regret = record.regret_trace.back();
  return record;
}

CasinoStream::CasinoStream(CasinoPolicy policy, std::vector<int> script)
    : policy_(policy), script_(std::move(script)) {
  for (int s : script_) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("CasinoStream: script entries must be +/-1");
    }
  }
}

std::vector<double> CasinoStream::next(long step,
                                       std::span<const std::size_t> past_bets,
                                       Rng& rng) {
  int outcome = 1;
  switch (policy_) {
    case CasinoPolicy::scripted:
      if (!script_.empty()) {
        outcome = script_[static_cast<std::size_t>(step) % script_.size()];
      }
      break;
    case CasinoPolicy::majority: {
      /* Count past bets on +1 (action 0); announce the opposite of the
       * modal bet, treating a tie as a bet on +1. */
      std::size_t heads = 0;
      for (std::size_t b : past_bets) {
        if (b == 0) ++heads;
      }
      bool mostly_heads = 2 * heads >= past_bets.size();
      outcome = mostly_heads ? -1 : 1;
      break;
    }
    case CasinoPolicy::coin:
      outcome = rng.bernoulli(0.5) ? 1 : -1;
      break;
  }
  outcomes_.push_back(outcome);
  return outcome == 1 ? std::vector<double>{-1.0, 1.0}
                      : std::vector<double>{1.0, -1.0};
}

double win_frequency(const RegretRecord& record) {
  if (record.bets.empty()) return 0.0;
  std::size_t wins = 0;
  for (std::size_t k = 0; k < record.bets.size(); ++k) {
    if (record.losses[k][record.bets[k]] < 0.0) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(record.bets.size());
}

}  // namespace smdkit
