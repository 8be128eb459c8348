#include "smdkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smdkit {

namespace {

void require_dim(std::size_t expect, std::size_t got, const char* where) {
  if (expect != got) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
}

}  // namespace

SimplexLinearProblem::SimplexLinearProblem(std::vector<double> c,
                                           NoiseModel model,
                                           double noise_scale,
                                           double declared_bound,
                                           double tail_alpha)
    : c_(std::move(c)),
      model_(model),
      noise_scale_(noise_scale),
      declared_bound_(declared_bound),
      tail_alpha_(tail_alpha) {
  if (c_.empty()) throw std::invalid_argument("SimplexLinearProblem: empty cost vector");
  if (noise_scale_ < 0.0 || declared_bound_ <= 0.0) {
    throw std::invalid_argument("SimplexLinearProblem: bad noise/bound constants");
  }
  if (model_ == NoiseModel::heavy_tail && tail_alpha_ <= 2.0) {
    throw std::invalid_argument(
        "SimplexLinearProblem: heavy-tail model needs tail index > 2");
  }
}

SimplexLinearProblem SimplexLinearProblem::canonical(std::size_t n,
                                                     NoiseModel model) {
  if (n < 2) throw std::invalid_argument("canonical: need n >= 2");
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = 0.5 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  /* Noise scales keep E ||c + noise||_inf^2 <= 1 for every model:
   * bounded:     |noise_i| <= 0.5, so ||grad||_inf <= 1 surely;
   * subgaussian: 0.15 * standard normals, light enough for the
   *              exp-moment condition at bound 1;
   * heavy_tail:  Pareto-type amplitude with index 3, second moment 0.125. */
  double scale = 0.5;
  if (model == NoiseModel::subgaussian) scale = 0.15;
  return SimplexLinearProblem(std::move(c), model, scale, 1.0, 3.0);
}

std::vector<double> SimplexLinearProblem::grad(std::span<const double> x,
                                               Rng& rng) const {
  require_dim(c_.size(), x.size(), "SimplexLinearProblem::grad");
  std::vector<double> g(c_);
  switch (model_) {
    case NoiseModel::bounded:
      for (double& v : g) v += noise_scale_ * rng.uniform(-1.0, 1.0);
      break;
    case NoiseModel::subgaussian:
      for (double& v : g) v += noise_scale_ * rng.normal();
      break;
    case NoiseModel::heavy_tail: {
      /* Amplitude w with P(w^2/s^2 >= t) = (1+t)^(-alpha), Rademacher signs
       * per coordinate. Finite second moment s^2/(alpha-1), polynomial tail. */
      double u = rng.uniform_open();
      double w = noise_scale_ *
                 std::sqrt(std::pow(u, -1.0 / tail_alpha_) - 1.0);
      for (double& v : g) v += (rng.bernoulli(0.5) ? w : -w);
      break;
    }
  }
  return g;
}

std::optional<double> SimplexLinearProblem::objective(
    std::span<const double> x) const {
  require_dim(c_.size(), x.size(), "SimplexLinearProblem::objective");
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * x[i];
  return s;
}

std::optional<double> SimplexLinearProblem::optimum() const {
  return *std::min_element(c_.begin(), c_.end());
}

QuadraticProblem::QuadraticProblem(std::vector<double> c, double mu2,
                                   double noise_scale, double declared_bound,
                                   double bias)
    : c_(std::move(c)),
      mu2_(mu2),
      noise_scale_(noise_scale),
      declared_bound_(declared_bound),
      bias_(bias) {
  if (c_.empty()) throw std::invalid_argument("QuadraticProblem: empty center");
  if (!(mu2_ > 0.0)) {
    throw std::invalid_argument("QuadraticProblem: modulus must be positive");
  }
}

std::vector<double> QuadraticProblem::grad(std::span<const double> x,
                                           Rng& rng) const {
  require_dim(c_.size(), x.size(), "QuadraticProblem::grad");
  std::vector<double> g(c_.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = mu2_ * (x[i] - c_[i]) + noise_scale_ * rng.uniform(-1.0, 1.0);
  }
  g[0] += bias_;
  return g;
}

std::optional<double> QuadraticProblem::objective(
    std::span<const double> x) const {
  require_dim(c_.size(), x.size(), "QuadraticProblem::objective");
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    s += (x[i] - c_[i]) * (x[i] - c_[i]);
  }
  return 0.5 * mu2_ * s;
}

double lattice_sign(std::span<const double> x, double cell) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (double v : x) {
    auto q = static_cast<std::int64_t>(std::floor(v / cell));
    std::uint64_t s = h ^ static_cast<std::uint64_t>(q);
    h = splitmix64(s);
  }
  return (h & 1ULL) ? 1.0 : -1.0;
}

SyntheticValueProblem::SyntheticValueProblem(
    Shape shape, std::vector<double> c, double noise_scale, double bias_level,
    double bias_cell, double value_bound, double lipschitz,
    std::optional<double> gradient_lipschitz)
    : shape_(shape),
      c_(std::move(c)),
      noise_scale_(noise_scale),
      bias_level_(bias_level),
      bias_cell_(bias_cell),
      value_bound_(value_bound),
      lipschitz_(lipschitz),
      gradient_lipschitz_(gradient_lipschitz) {
  if (c_.empty()) throw std::invalid_argument("SyntheticValueProblem: empty center");
  if (bias_level_ > 0.0 && !(bias_cell_ > 0.0)) {
    throw std::invalid_argument(
        "SyntheticValueProblem: corruption needs a positive cell size");
  }
}

double SyntheticValueProblem::clean_value(std::span<const double> x) const {
  require_dim(c_.size(), x.size(), "SyntheticValueProblem::value");
  switch (shape_) {
    case Shape::linear: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * x[i];
      return s;
    }
    case Shape::quadratic: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        s += (x[i] - c_[i]) * (x[i] - c_[i]);
      }
      return 0.5 * s;
    }
    case Shape::norm: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        s += (x[i] - c_[i]) * (x[i] - c_[i]);
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double SyntheticValueProblem::value(std::span<const double> x, Rng& rng) const {
  double v = clean_value(x);
  if (noise_scale_ > 0.0) v += noise_scale_ * rng.uniform(-1.0, 1.0);
  if (bias_level_ > 0.0) v += bias_level_ * lattice_sign(x, bias_cell_);
  return v;
}

std::vector<double> SyntheticValueProblem::grad(std::span<const double> x,
                                                Rng& rng) const {
  require_dim(c_.size(), x.size(), "SyntheticValueProblem::grad");
  std::vector<double> g(c_.size(), 0.0);
  switch (shape_) {
    case Shape::linear:
      g = c_;
      break;
    case Shape::quadratic:
      for (std::size_t i = 0; i < c_.size(); ++i) g[i] = x[i] - c_[i];
      break;
    case Shape::norm: {
      double n2 = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        n2 += (x[i] - c_[i]) * (x[i] - c_[i]);
      }
      double n = std::sqrt(n2);
      if (n > 0.0) {
        for (std::size_t i = 0; i < c_.size(); ++i) g[i] = (x[i] - c_[i]) / n;
      }
      break;
    }
  }
  if (noise_scale_ > 0.0) {
    for (double& v : g) v += noise_scale_ * rng.uniform(-1.0, 1.0);
  }
  return g;
}

std::optional<double> SyntheticValueProblem::objective(
    std::span<const double> x) const {
  return clean_value(x);
}

std::optional<double> SyntheticValueProblem::optimum() const {
  if (optimum_hint_) return optimum_hint_;
  switch (shape_) {
    case Shape::linear:
      return std::nullopt;  /* unbounded below on R^n */
    case Shape::quadratic:
    case Shape::norm:
      return 0.0;
  }
  return std::nullopt;
}

}  // namespace smdkit
