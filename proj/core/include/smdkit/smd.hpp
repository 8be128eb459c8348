#pragma once

#include <functional>
#include <memory>

#include "smdkit/oracle.hpp"
#include "smdkit/prox.hpp"
#include "smdkit/records.hpp"

namespace smdkit {

/* Iterations needed to reach expected gap eps with the fixed-step method:
 * ceil(2 M^2 R^2 / eps^2). Values within 1e-12 relative of an integer round
 * to that integer before the ceiling. */
long required_iterations(double M, double R, double eps);

/* Fixed-step stochastic mirror descent from the start point:
 *   x^{k+1} = mirror_step(x^k, grad(x^k), h),  h = (R/M) sqrt(2/N),
 * returning the uniform average of x^0 ... x^{N-1}. Expected gap of the
 * average is at most M R sqrt(2/N). */
RunRecord run_smd(const StochasticOracle& oracle, const ProxGeometry& geometry,
                  const SolverConfig& config);

double fixed_step_gap_bound(double M, double R, long N);

/* Decaying-step variant for mu2-strongly-convex objectives on a Euclidean
 * geometry: h_k = 1/(mu2 k) for k = 1..N, averaging x^1 ... x^N. Expected gap
 * is at most M2^2 (1 + ln N) / (2 mu2 N) + delta. */
RunRecord run_smd_strongly_convex(const StochasticOracle& oracle,
                                  const ProxGeometry& geometry,
                                  const SolverConfig& config);

double strongly_convex_gap_bound(double M2, double mu2, long N, double delta);

/* Trajectories to average so the gap bound holds with confidence 1 - sigma. */
long confidence_trajectories(double sigma);

/* Runs K = confidence_trajectories(sigma) independent fixed-step trajectories
 * on oracles built per trajectory index (each gets its own stream derived
 * from config.seed) and returns the equal-weight average of the trajectory
 * averages, computed in trajectory order. */
using OracleFactory =
    std::function<std::unique_ptr<StochasticOracle>(std::size_t trajectory)>;

RunRecord run_parallel_aggregate(const OracleFactory& factory,
                                 const ProxGeometry& geometry,
                                 const SolverConfig& config, double sigma);

}  // namespace smdkit
