#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smdkit/rng.hpp"

namespace smdkit {

enum class NoiseModel { bounded, subgaussian, heavy_tail };

/* First-order stochastic oracle. grad() returns one subgradient realization;
 * the declared constants are promises the tests audit by Monte Carlo:
 *   - grad_bound M:    E ||grad(x)||_q^2 <= M^2 on the relevant region,
 *   - bias_level delta: || E grad(x) - true subgradient ||_q <= delta,
 *   - strong_convexity mu2: modulus in the Euclidean norm (0 if none).
 * objective()/optimum() expose the noiseless objective on synthetic problems
 * so runners can report optimality gaps. */
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual std::vector<double> grad(std::span<const double> x, Rng& rng) const = 0;

  virtual NoiseModel noise_model() const { return NoiseModel::bounded; }
  virtual double grad_bound() const = 0;
  virtual double tail_index() const { return 0.0; }  /* heavy_tail only */
  virtual double bias_level() const { return 0.0; }
  virtual double strong_convexity() const { return 0.0; }

  virtual std::optional<double> objective(std::span<const double>) const {
    return std::nullopt;
  }
  virtual std::optional<double> optimum() const { return std::nullopt; }
};

/* Zeroth-order oracle: noisy function values, optionally a gradient
 * realization for directional feedback. Declared constants:
 *   - bias_level delta:  |E value(x) - f(x)| <= delta (adversarial part),
 *   - value_bound B:     E f(x,xi)^2 <= B^2 near the probed region,
 *   - lipschitz M2:      E ||grad f(x,xi)||_2^2 <= M2^2,
 *   - gradient_lipschitz L2 when f is smooth. */
class ValueOracle {
 public:
  virtual ~ValueOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x, Rng& rng) const = 0;

  virtual bool has_gradient() const { return false; }
  virtual std::vector<double> grad(std::span<const double>, Rng&) const {
    return {};
  }

  /* Probe points may leave the solver's feasible set; the oracle declares the
   * enlarged domain it supports. */
  virtual bool in_domain(std::span<const double>) const { return true; }

  virtual double bias_level() const { return 0.0; }
  virtual double value_bound() const = 0;
  virtual double lipschitz() const = 0;
  virtual std::optional<double> gradient_lipschitz() const {
    return std::nullopt;
  }

  virtual std::optional<double> objective(std::span<const double>) const {
    return std::nullopt;
  }
  virtual std::optional<double> optimum() const { return std::nullopt; }
};

}  // namespace smdkit
