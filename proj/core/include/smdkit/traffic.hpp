#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smdkit/rng.hpp"

namespace smdkit {

/* Congestion-game layer: a road network with explicit path sets, BPR link
 * delays, the Beckmann potential whose gradient is the path-cost map, its
 * entropy-regularized variant, exp-weights dynamics per origin-destination
 * pair, logit revision dynamics, and the smoothed dual over link times. */

/* Link with delay tau(f) = t0 * (1 + rho * (f/fbar)^(1/mu)). rho = 0 means a
 * constant-cost link. The standard quartic BPR curve is mu = 1/4. */
struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  double t0 = 1.0;
  double rho = 0.0;
  double mu = 1.0;
  double fbar = 1.0;
};

struct OdPair {
  std::string origin;
  std::string dest;
  double demand = 0.0;
  std::vector<std::vector<std::size_t>> paths;  /* edge indices per path */
};

/* Validated network. Path flows are stacked in one vector, OD blocks in
 * order, block w starting at path_offset(w); feasible flows are nonnegative
 * and sum to demand(w) per block. */
class RoadNetwork {
 public:
  RoadNetwork(std::vector<std::string> nodes, std::vector<Edge> edges,
              std::vector<OdPair> od_pairs);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<OdPair>& od_pairs() const { return od_pairs_; }

  std::size_t path_count() const { return path_count_; }
  std::size_t path_offset(std::size_t od_index) const {
    return path_offsets_[od_index];
  }
  std::size_t max_path_length() const { return max_path_length_; }  /* H */

  /* Ceiling on any single link cost: max_e tau_e(D_e), where D_e sums the
   * demands of OD pairs with some path through e. */
  double cost_ceiling() const { return cost_ceiling_; }
  /* Ceiling on any path cost: cost_ceiling * max_path_length. */
  double cost_bound() const { return cost_bound_; }
  double total_demand() const { return total_demand_; }

  /* Proportional split of each demand over its paths. */
  std::vector<double> uniform_path_flows() const;

  void require_path_flow(std::span<const double> x, const char* where) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<OdPair> od_pairs_;
  std::vector<std::size_t> path_offsets_;
  std::size_t path_count_ = 0;
  std::size_t max_path_length_ = 0;
  double cost_ceiling_ = 0.0;
  double cost_bound_ = 0.0;
  double total_demand_ = 0.0;
};

/* Link-level BPR quantities. */
double bpr_cost(const Edge& edge, double flow);
/* Integral of the delay from 0 to flow:
 * t0*f + t0*rho*(mu/(1+mu)) * f^(1+1/mu) / fbar^(1/mu). */
double edge_delay_integral(const Edge& edge, double flow);
/* Flow with tau(f) = t; needs rho > 0 and t >= t0. */
double edge_delay_inverse(const Edge& edge, double t);

/* Aggregation along the path incidence: f_e = sum of x_p over paths through
 * e, and path costs G_p = sum of member-link delays at those flows. */
std::vector<double> edge_flows(const RoadNetwork& network,
                               std::span<const double> x);
std::vector<double> path_costs(const RoadNetwork& network,
                               std::span<const double> x);
/* Path costs from explicit link times (no flow evaluation). */
std::vector<double> path_costs_from_times(const RoadNetwork& network,
                                          std::span<const double> times);

/* Sum of link delay integrals at the flows induced by x; its partial
 * derivative in x_p is exactly the path cost G_p(x). */
double beckmann_potential(const RoadNetwork& network, std::span<const double> x);

/* beckmann_potential + gamma * sum_w sum_p x_p ln(x_p / d_w), the strictly
 * convex smoothed objective (0 ln 0 = 0 at the boundary). */
double entropy_potential(const RoadNetwork& network, std::span<const double> x,
                         double gamma);
/* Difference against the plain x ln x entropy convention:
 * gamma * sum_w d_w ln d_w. Adding it converts entropy_potential values to
 * that convention; minimizers are unchanged. */
double entropy_convention_shift(const RoadNetwork& network, double gamma);

/* Certified lower bound on the minimum of beckmann_potential over feasible
 * flows, valid for any admissible link-time vector t:
 *   sum_w d_w min_p c_p(t) - sum_e sigma*_e(t_e),
 * where c_p(t) sums t over the path. Tight as t approaches equilibrium. */
double potential_lower_bound(const RoadNetwork& network,
                             std::span<const double> times);

/* Horizon bound for the per-OD exp-weights dynamics below:
 *   (M/sqrt(N)) * max_w ln n_w / sqrt(2 min_w ln n_w) * (sum_w d_w^2 + 1),
 * with M = cost_bound(). Infinite when some OD pair has a single path. */
double exp_weights_gap_bound(const RoadNetwork& network, long rounds);

struct TrafficEqRecord {
  std::vector<double> path_flows;  /* time-averaged flows */
  std::vector<double> edge_flows;
  double potential = 0.0;          /* Beckmann value at the averaged flows */
  double psi_star_lower = 0.0;     /* certified lower bound on the optimum */
  double gap = 0.0;                /* potential - psi_star_lower */
  double bound = 0.0;              /* exp_weights_gap_bound at this horizon */
  long rounds = 0;
  std::vector<long> trace_steps;
  std::vector<double> trace_potentials;  /* of the running average */
  std::vector<double> trace_gaps;
  double wall_seconds = 0.0;
};

/* Each OD pair runs the multiplicative-weights update on its own path-cost
 * slice (exact costs, no sampling), scaled to its demand, with the
 * horizon-tuned step sqrt(2 ln n_w / N) / cost_bound. Reports the potential
 * gap of the time-averaged flows against psi_star_lower (computed via the
 * smoothed dual at a small temperature unless supplied). */
TrafficEqRecord run_exp_weights_traffic(
    const RoadNetwork& network, long rounds, long trace_stride = 0,
    std::optional<double> psi_star_lower = std::nullopt);

/* Zero-mean Gumbel draw at temperature gamma (variance gamma^2 pi^2 / 6),
 * by inverse CDF: -gamma * (ln(-ln u) + Euler constant). */
double gumbel_sample(double gamma, Rng& rng);

/* Softmin distribution exp(-c_p/gamma) / sum_q exp(-c_q/gamma), stabilized
 * by min subtraction. */
std::vector<double> logit_choice(std::span<const double> costs, double gamma);

/* Gibbs recovery of path flows from link times: per OD pair,
 * d_w * logit_choice over the path costs c_p(t). Feasible by construction. */
std::vector<double> recover_path_flows(const RoadNetwork& network,
                                       std::span<const double> times,
                                       double gamma);

enum class DynamicsMode { mean_field, agent };

struct LogitDynamicsConfig {
  double gamma = 0.1;
  double lambda = 1.0;     /* revision rate; probability lambda/time_scale per tick */
  long time_scale = 10;
  long ticks = 0;
  DynamicsMode mode = DynamicsMode::mean_field;
  long agents_per_unit = 0;  /* agent mode: d_w * agents_per_unit agents per OD */
  std::uint64_t seed = 0;
  long trace_stride = 0;
};

struct DynamicsRecord {
  std::vector<double> final_flows;
  std::vector<double> average_flows;  /* time average over all ticks */
  std::vector<long> trace_steps;
  std::vector<std::vector<double>> trace_flows;
  std::vector<double> trace_potentials;  /* entropy_potential at traced ticks */
  double wall_seconds = 0.0;
};

/* Revision dynamics. Mean field: per tick and OD,
 * x_w <- (1 - eta) x_w + eta * d_w * logit_choice(G_w(x), gamma) with
 * eta = lambda / time_scale. Agent mode: d_w * agents_per_unit individual
 * agents each revise with probability lambda/time_scale per tick, choosing
 * the path maximizing -G_p + Gumbel(gamma) noise (ties broken uniformly);
 * costs within one tick are frozen at the tick-start flows, agents are
 * visited in fixed order on one rng stream. */
DynamicsRecord run_logit_dynamics(const RoadNetwork& network,
                                  const LogitDynamicsConfig& config);

/* Convex conjugate of the link delay integral on t >= t0, for rho > 0:
 *   sigma*(t) = fbar * ((t - t0)/(t0 rho))^mu * (t - t0)/(1 + mu),
 * with derivative equal to edge_delay_inverse. Constant-cost links (rho = 0)
 * admit only t = t0, where sigma* = 0. */
double conjugate_sigma(const Edge& edge, double t);
double conjugate_sigma_prime(const Edge& edge, double t);

struct DualEval {
  double value = 0.0;
  std::vector<double> gradient;  /* per edge; pinned rho=0 coordinates are 0 */
};

/* Smoothed dual objective over link times,
 *   gamma * sum_w d_w ln sum_p exp(-c_p(t)/gamma) + sum_e sigma*_e(t_e),
 * log-sum-exp stabilized. Its gradient component at edge e is
 * sigma*'_e(t_e) - f_e(x(t)) with x(t) the Gibbs recovery; at the minimum
 * the recovery closes the fixed-point chain. The minimum value is the
 * negative of the entropy_potential minimum. */
DualEval smoothed_dual_objective(const RoadNetwork& network,
                                 std::span<const double> times, double gamma);

/* Mismatch of the chain t -> x -> f against the flows that generate t:
 * max over rho>0 links of |edge_delay_inverse(t_e) - f_e(x(t))|. Constant
 * cost links carry no flow information and contribute zero. */
double fixed_point_residual(const RoadNetwork& network,
                            std::span<const double> times, double gamma);

enum class DualMethod { fixed_point, dual_gradient };

struct DualState {
  std::vector<double> times;
  std::vector<double> path_flows;
  std::vector<double> edge_flows;
  double gamma = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<long> trace_steps;
  std::vector<double> trace_residuals;
};

/* Smoothed equilibrium at temperature gamma. Default method iterates the
 * flow chain F(f) = edge_flows(recover_path_flows(tau(f))) with averaging
 * f <- (1 - b_m) f + b_m F(f), b_m = 1/(m+1), stopping when the undamped
 * chain mismatch ||F(f) - f||_inf <= tol (a stricter test than the step
 * difference, which the vanishing b_m would shrink regardless of progress).
 * The dual_gradient method minimizes smoothed_dual_objective by projected
 * gradient descent on the times, scaled per coordinate by a curvature bound
 * and safeguarded by Armijo backtracking, as an independent cross-check.
 * Non-convergence is reported in the state, not thrown. */
DualState solve_dual(const RoadNetwork& network, double gamma, double tol,
                     long max_iters,
                     DualMethod method = DualMethod::fixed_point,
                     long trace_stride = 0);

struct WardropReport {
  bool satisfied = false;
  /* Smallest over OD pairs of (cheapest unused cost - costliest used cost);
   * positive when every used path is at least as cheap as every unused one.
   * Infinite when no OD pair has an unused path. */
  double worst_slack = 0.0;
  std::size_t worst_od = 0;
  double max_used_cost = 0.0;
  double min_unused_cost = 0.0;
  double usage_threshold = 0.0;
  double tolerance = 0.0;
};

/* Variational equilibrium test: paths carrying at least usage_frac * d_w are
 * "used"; the condition is max used cost <= min unused cost + tol per OD. */
WardropReport wardrop_check(const RoadNetwork& network,
                            std::span<const double> x,
                            double usage_frac = 1e-3, double tol = 1e-3);

/* Seeded small instance for cross-method checks and benchmarks: the complete
 * DAG on nodes 0..3 (one link per ordered pair), OD pairs 0->3 with all four
 * simple paths and 1->3 with both of its paths. Free-flow times land in
 * [0.5, 2], congestion gains in [0.2, 1], capacities in [0.6, 2], exponents
 * in {1, 1/2, 1/4}, demands in [0.5, 2]; every link is congestible. */
RoadNetwork random_small_network(std::uint64_t seed);

}  // namespace smdkit
