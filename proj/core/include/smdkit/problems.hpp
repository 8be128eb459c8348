#pragma once

#include <optional>
#include <vector>

#include "smdkit/oracle.hpp"

namespace smdkit {

/* Synthetic problems with known optima, shared by tests, the acceptance
 * suite, and the CLI. Declared oracle constants are chosen so the promises
 * hold with slack; the test suite audits them by Monte Carlo. */

/* Linear minimization on the simplex, f(x) = <c, x>, optimum at the smallest
 * coefficient. The gradient sample is c plus zero-mean noise in one of the
 * three supported models; the declared bound is on E ||grad||_inf^2. */
class SimplexLinearProblem : public StochasticOracle {
 public:
  SimplexLinearProblem(std::vector<double> c, NoiseModel model,
                       double noise_scale, double declared_bound,
                       double tail_alpha = 3.0);

  /* n-dimensional instance with cost spread 0.5 and declared bound M = 1. */
  static SimplexLinearProblem canonical(std::size_t n, NoiseModel model);

  std::size_t dim() const override { return c_.size(); }
  std::vector<double> grad(std::span<const double> x, Rng& rng) const override;
  NoiseModel noise_model() const override { return model_; }
  double grad_bound() const override { return declared_bound_; }
  double tail_index() const override { return tail_alpha_; }
  std::optional<double> objective(std::span<const double> x) const override;
  std::optional<double> optimum() const override;

  const std::vector<double>& costs() const { return c_; }

 private:
  std::vector<double> c_;
  NoiseModel model_;
  double noise_scale_;
  double declared_bound_;
  double tail_alpha_;
};

/* Strongly convex quadratic f(x) = mu2/2 ||x - c||_2^2 on R^n with bounded
 * per-coordinate gradient noise and an optional constant bias vector of
 * Euclidean norm bias_level along the first coordinate. */
class QuadraticProblem : public StochasticOracle {
 public:
  QuadraticProblem(std::vector<double> c, double mu2, double noise_scale,
                   double declared_bound, double bias = 0.0);

  std::size_t dim() const override { return c_.size(); }
  std::vector<double> grad(std::span<const double> x, Rng& rng) const override;
  double grad_bound() const override { return declared_bound_; }
  double bias_level() const override { return bias_; }
  double strong_convexity() const override { return mu2_; }
  std::optional<double> objective(std::span<const double> x) const override;
  std::optional<double> optimum() const override { return 0.0; }

 private:
  std::vector<double> c_;
  double mu2_;
  double noise_scale_;
  double declared_bound_;
  double bias_;
};

/* Value-feedback problems for the gradient-free runners.
 *
 * Shapes: linear <c, x>; quadratic 0.5 ||x - c||^2; norm ||x - c||_2 (the
 * nonsmooth reference). value() adds bounded zero-mean noise plus an optional
 * deterministic corruption of magnitude bias_level: the sign comes from a
 * position hash on a grid of pitch bias_cell, so nearby probes see
 * decorrelated +/- bias_level offsets (the adversarial regime for
 * difference-based estimators). */
class SyntheticValueProblem : public ValueOracle {
 public:
  enum class Shape { linear, quadratic, norm };

  SyntheticValueProblem(Shape shape, std::vector<double> c, double noise_scale,
                        double bias_level, double bias_cell, double value_bound,
                        double lipschitz,
                        std::optional<double> gradient_lipschitz);

  std::size_t dim() const override { return c_.size(); }
  double value(std::span<const double> x, Rng& rng) const override;
  bool has_gradient() const override { return true; }
  std::vector<double> grad(std::span<const double> x, Rng& rng) const override;

  double bias_level() const override { return bias_level_; }
  double value_bound() const override { return value_bound_; }
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> gradient_lipschitz() const override {
    return gradient_lipschitz_;
  }
  std::optional<double> objective(std::span<const double> x) const override;
  std::optional<double> optimum() const override;

  /* Minimum of the clean objective over the set the caller optimizes on; the
   * shapes themselves live on all of R^n, where linear has no minimum. */
  void set_optimum_hint(double v) { optimum_hint_ = v; }

  double clean_value(std::span<const double> x) const;

 private:
  Shape shape_;
  std::vector<double> c_;
  double noise_scale_;
  double bias_level_;
  double bias_cell_;
  double value_bound_;
  double lipschitz_;
  std::optional<double> gradient_lipschitz_;
  std::optional<double> optimum_hint_;
};

/* Deterministic +/-1 from the lattice cell containing x; the corruption term
 * of SyntheticValueProblem. Exposed so tests can pin its behaviour. */
double lattice_sign(std::span<const double> x, double cell);

}  // namespace smdkit
