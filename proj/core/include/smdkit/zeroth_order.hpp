#pragma once

#include <optional>
#include <span>
#include <vector>

#include "smdkit/oracle.hpp"
#include "smdkit/prox.hpp"
#include "smdkit/records.hpp"
#include "smdkit/rng.hpp"

namespace smdkit {

enum class FeedbackKind { one_point, two_point, directional, double_smoothed };

/* Second-probe placement for the double-smoothed estimator. `matched` keeps
 * the first-stage offset tau1*e1 in both probes so it cancels from the
 * difference; `rescaled` shrinks it to tau2*e1 in the second probe. */
enum class SecondProbe { matched, rescaled };

struct SmoothingParams {
  FeedbackKind kind = FeedbackKind::two_point;
  double tau1 = 0.0;                   /* single tau for one/two-point */
  double tau2 = 0.0;                   /* double smoothing only */
  std::optional<double> delta_max;     /* admissible adversarial-noise level */
};

/* Uniform on the Euclidean unit sphere (normalized Gaussian vector) and in
 * the closed unit ball (sphere point pushed inward by U^{1/n}). */
std::vector<double> sample_sphere(std::size_t n, Rng& rng);
std::vector<double> sample_ball(std::size_t n, Rng& rng);

/* Upper-bound factors for moments of a uniform sphere direction e, with
 * q in {2, inf} (pass infinity()). Each caps its bound by the sure bound
 * ||e||_q <= 1 (q >= 2), which also covers small n where the logarithmic
 * expression goes nonpositive:
 *   sphere_norm_factor:      E ||e||_q^2        <= min{q-1, 16 ln n - 8} n^{2/q-1}
 *   sphere_alignment_factor: E <c,e>^2          <= ||c||_2^2 / n   (equality)
 *   sphere_cross_factor:     E <c,e>^2 ||e||_q^2 <= ||c||_2^2 sqrt(3) min{2q-1, 32 ln n - 8} n^{2/q-2} */
double sphere_norm_factor(std::size_t n, double q);
double sphere_alignment_factor(std::size_t n);
double sphere_cross_factor(std::size_t n, double q);

/* Gradient surrogates built from value or directional feedback. All keep
 * E[estimator] close to a gradient of a smoothed version of f; the runner
 * treats them as stochastic subgradients. Value-based ones draw one noise
 * realization per call pair (common random numbers), as the two-point
 * constructions require. */
std::vector<double> one_point_gradient(const ValueOracle& oracle,
                                       std::span<const double> x, double tau,
                                       std::span<const double> e, Rng& rng);
std::vector<double> two_point_gradient(const ValueOracle& oracle,
                                       std::span<const double> x, double tau,
                                       std::span<const double> e, Rng& rng);
std::vector<double> directional_gradient(const ValueOracle& oracle,
                                         std::span<const double> x,
                                         std::span<const double> e, Rng& rng);
std::vector<double> double_smoothed_gradient(
    const ValueOracle& oracle, std::span<const double> x, double tau1,
    double tau2, std::span<const double> e1, std::span<const double> e2,
    Rng& rng, SecondProbe probe = SecondProbe::matched);

/* Smoothing radii and admissible noise level for a target accuracy eps:
 *   two_point (needs L2):  tau = min{max{eps/(2 M2), sqrt(eps/L2)},
 *                                    (M2/L2) sqrt(1/(6 n))},
 *                          delta_max = eps^{3/2} / (16 R sqrt(L2 n));
 *   double_smoothed:       tau1 = eps/(4 M2), tau2 = eps/(4 M2 n),
 *                          delta_max = eps^2 / (56 M2 R n^{3/2});
 *   one_point:             tau = eps/(2 M2), no noise guarantee;
 *   directional:           no smoothing (zero radii). */
SmoothingParams choose_smoothing_params(double eps, double m2,
                                        std::optional<double> l2, double radius,
                                        std::size_t n, FeedbackKind kind);

/* Conservative bound on E ||estimator||_q^2, used to scale the mirror-descent
 * step. Combines the sphere-moment factors above with the oracle constants:
 *   one_point:       (n B / tau)^2 * S_q
 *   two_point:       3/4 n^2 tau^2 L2^2 S_q + 3 n^2 M2^2 W_q
 *                    + 12 n^2 (delta/tau)^2 S_q
 *   double_smoothed: two-point formula at tau2 with the smoothed-surface
 *                    curvature L_eff = M2 sqrt(n)/tau1 in place of L2
 *   directional:     n^2 M2^2 W_q
 * where S_q = sphere_norm_factor, W_q = sphere_cross_factor. */
double surrogate_second_moment(const ValueOracle& oracle,
                               const SmoothingParams& smoothing, double q);

struct ZeroOrderConfig {
  long iterations = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  long trace_stride = 0;               /* 0 disables tracing */
  SecondProbe second_probe = SecondProbe::matched;
  std::optional<std::vector<double>> start;
};

/* Mirror descent driven by the chosen surrogate. Fixed step
 * h = (R / M_est) sqrt(2/N) with M_est^2 = surrogate_second_moment. Records
 * oracle calls (N for one_point/directional, 2N otherwise) and pushes a
 * warning when the oracle's adversarial-noise level exceeds delta_max. */
RunRecord run_zeroth_order(const ValueOracle& oracle,
                           const ProxGeometry& geometry,
                           const ZeroOrderConfig& config,
                           const SmoothingParams& smoothing);

}  // namespace smdkit
