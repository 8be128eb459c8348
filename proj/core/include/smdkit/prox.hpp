#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace smdkit {

/* Prox setups shared by every solver: a distance-generating function d on a
 * feasible set Q, its Bregman divergence V, and the mirror step
 *
 *   z = argmin_{z in Q} { h*<v, z - x> + V(z, x) }.
 *
 * Two geometries are supported: negative entropy on the probability simplex
 * (p = 1, dual exponent q = inf) and half squared Euclidean norm, either
 * unconstrained or restricted to the simplex (p = q = 2). */

enum class ProxKind {
  entropic_simplex,
  euclidean_free,
  euclidean_simplex,
};

inline constexpr double kFeasibilityTol = 1e-12;

class ProxGeometry {
 public:
  ProxGeometry(ProxKind kind, std::size_t dim);

  ProxKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  /* Norm exponent p of the strong-convexity norm of d, and the dual
   * exponent q with 1/p + 1/q = 1 (q = inf reported as infinity). */
  double p() const;
  double q() const;

  bool constrained() const { return kind_ != ProxKind::euclidean_free; }

  /* Uniform point on the simplex, origin for the free Euclidean case;
   * prox_value vanishes here. */
  std::vector<double> start_point() const;

  bool contains(std::span<const double> x, std::string* why = nullptr) const;
  void require_feasible(std::span<const double> x, const char* where) const;

  double prox_value(std::span<const double> x) const;
  double bregman(std::span<const double> x, std::span<const double> y) const;
  std::vector<double> mirror_step(std::span<const double> x,
                                  std::span<const double> v, double h) const;

 private:
  ProxKind kind_;
  std::size_t dim_;
};

/* Euclidean projection onto { z >= 0, sum z = 1 }, sort-and-threshold,
 * O(n log n). */
std::vector<double> project_to_simplex(std::span<const double> y);

}  // namespace smdkit
