#include "smdkit/traffic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smdkit/online.hpp"

namespace smdkit {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286;
/* Relative slack for pinning t = t0 on constant-cost links. */
constexpr double kPinTol = 1e-9;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_time_domain(const RoadNetwork& network,
                         std::span<const double> times, const char* where) {
  const auto& edges = network.edges();
  if (times.size() != edges.size()) {
    throw std::invalid_argument(std::string(where) +
                                ": time vector size does not match edge count");
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    if (!std::isfinite(times[e])) {
      throw std::domain_error(std::string(where) + ": edge '" + edge.id +
                              "': non-finite time");
    }
    if (edge.rho == 0.0) {
      if (std::abs(times[e] - edge.t0) > kPinTol * std::max(1.0, edge.t0)) {
        throw std::domain_error(std::string(where) + ": edge '" + edge.id +
                                "': constant-cost link admits only t = t0");
      }
    } else if (times[e] < edge.t0 * (1.0 - kPinTol)) {
      throw std::domain_error(std::string(where) + ": edge '" + edge.id +
                              "': time below the free-flow floor");
    }
  }
}

std::vector<double> link_times(const RoadNetwork& network,
                               std::span<const double> flows) {
  const auto& edges = network.edges();
  std::vector<double> t(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    t[e] = bpr_cost(edges[e], flows[e]);
  }
  return t;
}

/* One application of the chain f -> t -> x -> f. */
std::vector<double> chain_map(const RoadNetwork& network,
                              std::span<const double> flows, double gamma) {
  std::vector<double> t = link_times(network, flows);
  std::vector<double> x = recover_path_flows(network, t, gamma);
  return edge_flows(network, x);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

RoadNetwork::RoadNetwork(std::vector<std::string> nodes,
                         std::vector<Edge> edges, std::vector<OdPair> od_pairs)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      od_pairs_(std::move(od_pairs)) {
  if (nodes_.empty()) throw std::invalid_argument("RoadNetwork: no nodes");
  if (edges_.empty()) throw std::invalid_argument("RoadNetwork: no edges");
  if (od_pairs_.empty()) {
    throw std::invalid_argument("RoadNetwork: no od_pairs");
  }

  auto known_node = [&](const std::string& id) {
    return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (nodes_[i] == nodes_[j]) {
        throw std::invalid_argument("RoadNetwork: duplicate node id '" +
                                    nodes_[i] + "'");
      }
    }
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    std::string tag = "RoadNetwork: edge '" + edge.id + "'";
    for (std::size_t e2 = e + 1; e2 < edges_.size(); ++e2) {
      if (edges_[e2].id == edge.id) {
        throw std::invalid_argument(tag + ": duplicate edge id");
      }
    }
    if (!known_node(edge.tail)) {
      throw std::invalid_argument(tag + ": tail '" + edge.tail +
                                  "' is not a node");
    }
    if (!known_node(edge.head)) {
      throw std::invalid_argument(tag + ": head '" + edge.head +
                                  "' is not a node");
    }
    if (!(edge.t0 > 0.0)) throw std::invalid_argument(tag + ": t0 must be positive");
    if (edge.rho < 0.0) throw std::invalid_argument(tag + ": rho must be >= 0");
    if (!(edge.mu > 0.0)) throw std::invalid_argument(tag + ": mu must be positive");
    if (!(edge.fbar > 0.0)) {
      throw std::invalid_argument(tag + ": fbar must be positive");
    }
  }

  path_offsets_.reserve(od_pairs_.size());
  std::vector<double> demand_through(edges_.size(), 0.0);
  for (std::size_t w = 0; w < od_pairs_.size(); ++w) {
    const OdPair& od = od_pairs_[w];
    std::string tag = "RoadNetwork: od_pair " + std::to_string(w) + " (" +
                      od.origin + " -> " + od.dest + ")";
    if (!known_node(od.origin)) {
      throw std::invalid_argument(tag + ": origin is not a node");
    }
    if (!known_node(od.dest)) {
      throw std::invalid_argument(tag + ": destination is not a node");
    }
    if (!(od.demand > 0.0)) {
      throw std::invalid_argument(tag + ": demand must be positive");
    }
    if (od.paths.empty()) {
      throw std::invalid_argument(tag + ": empty path set");
    }
    std::vector<bool> touched(edges_.size(), false);
    for (std::size_t p = 0; p < od.paths.size(); ++p) {
      const auto& path = od.paths[p];
      std::string ptag = tag + ", path " + std::to_string(p);
      if (path.empty()) throw std::invalid_argument(ptag + ": empty path");
      const std::string* at = &od.origin;
      for (std::size_t s = 0; s < path.size(); ++s) {
        if (path[s] >= edges_.size()) {
          throw std::invalid_argument(ptag + ": unknown edge index " +
                                      std::to_string(path[s]));
        }
        const Edge& edge = edges_[path[s]];
        if (edge.tail != *at) {
          throw std::invalid_argument(ptag + ": edge '" + edge.id +
                                      "' starts at '" + edge.tail +
                                      "' but the walk is at '" + *at + "'");
        }
        at = &edge.head;
        touched[path[s]] = true;
      }
      if (*at != od.dest) {
        throw std::invalid_argument(ptag + ": ends at '" + *at +
                                    "', not the destination");
      }
      max_path_length_ = std::max(max_path_length_, path.size());
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (touched[e]) demand_through[e] += od.demand;
    }
    path_offsets_.push_back(path_count_);
    path_count_ += od.paths.size();
    total_demand_ += od.demand;
  }

  for (std::size_t e = 0; e < edges_.size(); ++e) {
    cost_ceiling_ = std::max(cost_ceiling_, bpr_cost(edges_[e], demand_through[e]));
  }
  cost_bound_ = cost_ceiling_ * static_cast<double>(max_path_length_);
}

std::vector<double> RoadNetwork::uniform_path_flows() const {
  std::vector<double> x(path_count_);
  for (std::size_t w = 0; w < od_pairs_.size(); ++w) {
    double share = od_pairs_[w].demand /
                   static_cast<double>(od_pairs_[w].paths.size());
    for (std::size_t p = 0; p < od_pairs_[w].paths.size(); ++p) {
      x[path_offsets_[w] + p] = share;
    }
  }
  return x;
}

void RoadNetwork::require_path_flow(std::span<const double> x,
                                    const char* where) const {
  if (x.size() != path_count_) {
    throw std::domain_error(std::string(where) + ": flow vector has " +
                            std::to_string(x.size()) + " entries, expected " +
                            std::to_string(path_count_));
  }
  for (std::size_t w = 0; w < od_pairs_.size(); ++w) {
    double sum = 0.0;
    for (std::size_t p = 0; p < od_pairs_[w].paths.size(); ++p) {
      double v = x[path_offsets_[w] + p];
      if (!(v >= -1e-9) || !std::isfinite(v)) {
        throw std::domain_error(std::string(where) + ": od_pair " +
                                std::to_string(w) + ": negative path flow");
      }
      sum += v;
    }
    if (std::abs(sum - od_pairs_[w].demand) >
        1e-9 * std::max(1.0, od_pairs_[w].demand)) {
      throw std::domain_error(std::string(where) + ": od_pair " +
                              std::to_string(w) + ": flows sum to " +
                              std::to_string(sum) + ", demand is " +
                              std::to_string(od_pairs_[w].demand));
    }
  }
}

double bpr_cost(const Edge& edge, double flow) {
  if (!(flow >= 0.0)) {
    throw std::domain_error("bpr_cost: edge '" + edge.id + "': negative flow");
  }
  if (edge.rho == 0.0) return edge.t0;
  return edge.t0 * (1.0 + edge.rho * std::pow(flow / edge.fbar, 1.0 / edge.mu));
}

double edge_delay_integral(const Edge& edge, double flow) {
  if (!(flow >= 0.0)) {
    throw std::domain_error("edge_delay_integral: edge '" + edge.id +
                            "': negative flow");
  }
  double linear = edge.t0 * flow;
  if (edge.rho == 0.0) return linear;
  double ex = 1.0 + 1.0 / edge.mu;
  return linear + edge.t0 * edge.rho * (edge.mu / (1.0 + edge.mu)) *
                      std::pow(flow, ex) / std::pow(edge.fbar, 1.0 / edge.mu);
}

double edge_delay_inverse(const Edge& edge, double t) {
  if (edge.rho == 0.0) {
    throw std::domain_error("edge_delay_inverse: edge '" + edge.id +
                            "': constant-cost link has no inverse");
  }
  if (t < edge.t0 * (1.0 - kPinTol)) {
    throw std::domain_error("edge_delay_inverse: edge '" + edge.id +
                            "': time below the free-flow floor");
  }
  double z = std::max(0.0, (t - edge.t0) / (edge.t0 * edge.rho));
  return edge.fbar * std::pow(z, edge.mu);
}

std::vector<double> edge_flows(const RoadNetwork& network,
                               std::span<const double> x) {
  network.require_path_flow(x, "edge_flows");
  std::vector<double> f(network.edges().size(), 0.0);
  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    for (std::size_t p = 0; p < ods[w].paths.size(); ++p) {
      double v = x[network.path_offset(w) + p];
      for (std::size_t e : ods[w].paths[p]) f[e] += v;
    }
  }
  for (double& v : f) v = std::max(v, 0.0);
  return f;
}

std::vector<double> path_costs_from_times(const RoadNetwork& network,
                                          std::span<const double> times) {
  if (times.size() != network.edges().size()) {
    throw std::invalid_argument(
        "path_costs_from_times: time vector size does not match edge count");
  }
  std::vector<double> c(network.path_count(), 0.0);
  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    for (std::size_t p = 0; p < ods[w].paths.size(); ++p) {
      double s = 0.0;
      for (std::size_t e : ods[w].paths[p]) s += times[e];
      c[network.path_offset(w) + p] = s;
    }
  }
  return c;
}

std::vector<double> path_costs(const RoadNetwork& network,
                               std::span<const double> x) {
  std::vector<double> f = edge_flows(network, x);
  return path_costs_from_times(network, link_times(network, f));
}

double beckmann_potential(const RoadNetwork& network,
                          std::span<const double> x) {
  std::vector<double> f = edge_flows(network, x);
  double s = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) {
    s += edge_delay_integral(network.edges()[e], f[e]);
  }
  return s;
}

double entropy_potential(const RoadNetwork& network, std::span<const double> x,
                         double gamma) {
  if (gamma < 0.0) {
    throw std::invalid_argument("entropy_potential: gamma must be >= 0");
  }
  double base = beckmann_potential(network, x);
  if (gamma == 0.0) return base;
  double ent = 0.0;
  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    for (std::size_t p = 0; p < ods[w].paths.size(); ++p) {
      double v = x[network.path_offset(w) + p];
      if (v > 0.0) ent += v * std::log(v / ods[w].demand);
    }
  }
  return base + gamma * ent;
}

double entropy_convention_shift(const RoadNetwork& network, double gamma) {
  double s = 0.0;
  for (const OdPair& od : network.od_pairs()) {
    s += od.demand * std::log(od.demand);
  }
  return gamma * s;
}

double potential_lower_bound(const RoadNetwork& network,
                             std::span<const double> times) {
  require_time_domain(network, times, "potential_lower_bound");
  std::vector<double> c = path_costs_from_times(network, times);
  double lb = 0.0;
  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    double best = kInf;
    for (std::size_t p = 0; p < ods[w].paths.size(); ++p) {
      best = std::min(best, c[network.path_offset(w) + p]);
    }
    lb += ods[w].demand * best;
  }
  for (std::size_t e = 0; e < network.edges().size(); ++e) {
    lb -= conjugate_sigma(network.edges()[e], times[e]);
  }
  return lb;
}

double exp_weights_gap_bound(const RoadNetwork& network, long rounds) {
  if (rounds < 1) {
    throw std::invalid_argument("exp_weights_gap_bound: rounds must be >= 1");
  }
  double min_ln = kInf;
  double max_ln = 0.0;
  double d2 = 0.0;
  for (const OdPair& od : network.od_pairs()) {
    double ln = std::log(static_cast<double>(od.paths.size()));
    min_ln = std::min(min_ln, ln);
    max_ln = std::max(max_ln, ln);
    d2 += od.demand * od.demand;
  }
  if (min_ln == 0.0) return kInf;  /* a single-path OD pair degenerates it */
  return network.cost_bound() / std::sqrt(static_cast<double>(rounds)) *
         max_ln / std::sqrt(2.0 * min_ln) * (d2 + 1.0);
}

TrafficEqRecord run_exp_weights_traffic(const RoadNetwork& network, long rounds,
                                        long trace_stride,
                                        std::optional<double> psi_star_lower) {
  if (rounds < 1) {
    throw std::invalid_argument("run_exp_weights_traffic: rounds must be >= 1");
  }
  auto t0 = Clock::now();
  TrafficEqRecord record;
  record.rounds = rounds;
  record.bound = exp_weights_gap_bound(network, rounds);

  if (psi_star_lower) {
    record.psi_star_lower = *psi_star_lower;
  } else {
    /* Near-equilibrium link times certify a lower bound on the optimum;
     * the small temperature keeps the smoothing slack negligible. */
    double gamma_small = 1e-4 * network.cost_ceiling();
    DualState eq = solve_dual(network, gamma_small, 1e-9, 20000);
    record.psi_star_lower = potential_lower_bound(network, eq.times);
  }

  const auto& ods = network.od_pairs();
  const double m = network.cost_bound();
  std::vector<double> h(ods.size());
  for (std::size_t w = 0; w < ods.size(); ++w) {
    double n_w = static_cast<double>(ods[w].paths.size());
    h[w] = std::sqrt(2.0 * std::log(n_w) / static_cast<double>(rounds)) / m;
  }

  std::vector<double> x = network.uniform_path_flows();
  std::vector<double> sum(x.size(), 0.0);
  for (long k = 0; k < rounds; ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] += x[i];
    if (trace_stride > 0 && k % trace_stride == 0) {
      std::vector<double> avg(sum);
      for (double& v : avg) v /= static_cast<double>(k + 1);
      double psi = beckmann_potential(network, avg);
      record.trace_steps.push_back(k);
      record.trace_potentials.push_back(psi);
      record.trace_gaps.push_back(psi - record.psi_star_lower);
    }
    std::vector<double> costs = path_costs(network, x);
    for (std::size_t w = 0; w < ods.size(); ++w) {
      std::size_t n_w = ods[w].paths.size();
      if (n_w == 1) continue;  /* nothing to learn on a single path */
      std::size_t off = network.path_offset(w);
      std::vector<double> p(n_w);
      for (std::size_t i = 0; i < n_w; ++i) p[i] = x[off + i] / ods[w].demand;
      std::vector<double> slice(costs.begin() + off, costs.begin() + off + n_w);
      p = exp_weights_step(p, slice, h[w]);
      for (std::size_t i = 0; i < n_w; ++i) x[off + i] = ods[w].demand * p[i];
    }
  }

  record.path_flows = sum;
  for (double& v : record.path_flows) v /= static_cast<double>(rounds);
  record.edge_flows = edge_flows(network, record.path_flows);
  record.potential = beckmann_potential(network, record.path_flows);
  record.gap = record.potential - record.psi_star_lower;
  record.wall_seconds = seconds_since(t0);
  return record;
}

double gumbel_sample(double gamma, Rng& rng) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gumbel_sample: gamma must be positive");
  }
  double u = rng.uniform_open();
  return -gamma * (std::log(-std::log(u)) + kEulerGamma);
}

std::vector<double> logit_choice(std::span<const double> costs, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("logit_choice: gamma must be positive");
  }
  if (costs.empty()) {
    throw std::invalid_argument("logit_choice: empty cost vector");
  }
  double lo = kInf;
  for (double c : costs) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("logit_choice: non-finite cost");
    }
    lo = std::min(lo, c);
  }
  std::vector<double> p(costs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p[i] = std::exp(-(costs[i] - lo) / gamma);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> recover_path_flows(const RoadNetwork& network,
                                       std::span<const double> times,
                                       double gamma) {
  require_time_domain(network, times, "recover_path_flows");
  std::vector<double> c = path_costs_from_times(network, times);
  std::vector<double> x(network.path_count());
  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    std::size_t off = network.path_offset(w);
    std::size_t n_w = ods[w].paths.size();
    std::vector<double> slice(c.begin() + off, c.begin() + off + n_w);
    std::vector<double> p = logit_choice(slice, gamma);
    for (std::size_t i = 0; i < n_w; ++i) x[off + i] = ods[w].demand * p[i];
  }
  return x;
}

DynamicsRecord run_logit_dynamics(const RoadNetwork& network,
                                  const LogitDynamicsConfig& config) {
  if (!(config.gamma > 0.0)) {
    throw std::invalid_argument("run_logit_dynamics: gamma must be positive");
  }
  if (!(config.lambda > 0.0)) {
    throw std::invalid_argument("run_logit_dynamics: lambda must be positive");
  }
  if (config.time_scale < 1 || config.lambda > static_cast<double>(config.time_scale)) {
    throw std::invalid_argument(
        "run_logit_dynamics: need time_scale >= 1 and lambda <= time_scale "
        "(revision probability lambda/time_scale)");
  }
  if (config.ticks < 1) {
    throw std::invalid_argument("run_logit_dynamics: ticks must be >= 1");
  }

  const auto& ods = network.od_pairs();
  const double eta = config.lambda / static_cast<double>(config.time_scale);

  /* Agent bookkeeping: counts per path, round-robin initial assignment. */
  std::vector<long> counts;
  double unit = 0.0;
  if (config.mode == DynamicsMode::agent) {
    if (config.agents_per_unit < 1) {
      throw std::invalid_argument(
          "run_logit_dynamics: agent mode needs agents_per_unit >= 1");
    }
    unit = static_cast<double>(config.agents_per_unit);
    counts.assign(network.path_count(), 0);
    for (std::size_t w = 0; w < ods.size(); ++w) {
      double raw = ods[w].demand * unit;
      double rounded = std::round(raw);
      if (std::abs(raw - rounded) > 1e-6 || rounded < 1.0) {
        throw std::invalid_argument(
            "run_logit_dynamics: od_pair " + std::to_string(w) + ": demand " +
            std::to_string(ods[w].demand) + " times " +
            std::to_string(config.agents_per_unit) +
            " agents per unit is not a positive integer");
      }
      long agents = static_cast<long>(rounded);
      std::size_t n_w = ods[w].paths.size();
      for (long a = 0; a < agents; ++a) {
        counts[network.path_offset(w) + static_cast<std::size_t>(a) % n_w] += 1;
      }
    }
  }

  auto flows_now = [&]() {
    if (config.mode == DynamicsMode::mean_field) return std::vector<double>();
    std::vector<double> x(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      x[i] = static_cast<double>(counts[i]) / unit;
    }
    return x;
  };

  auto t0 = Clock::now();
  DynamicsRecord record;
  Rng rng(config.seed);
  std::vector<double> x = config.mode == DynamicsMode::agent
                              ? flows_now()
                              : network.uniform_path_flows();
  std::vector<double> sum(x.size(), 0.0);

  for (long tick = 0; tick < config.ticks; ++tick) {
    if (config.trace_stride > 0 && tick % config.trace_stride == 0) {
      record.trace_steps.push_back(tick);
      record.trace_flows.push_back(x);
      record.trace_potentials.push_back(
          entropy_potential(network, x, config.gamma));
    }
    std::vector<double> costs = path_costs(network, x);

    if (config.mode == DynamicsMode::mean_field) {
      for (std::size_t w = 0; w < ods.size(); ++w) {
        std::size_t off = network.path_offset(w);
        std::size_t n_w = ods[w].paths.size();
        std::vector<double> slice(costs.begin() + off,
                                  costs.begin() + off + n_w);
        std::vector<double> p = logit_choice(slice, config.gamma);
        for (std::size_t i = 0; i < n_w; ++i) {
          x[off + i] = (1.0 - eta) * x[off + i] + eta * ods[w].demand * p[i];
        }
      }
    } else {
      /* Costs stay frozen at the tick-start flows; agents revise one after
       * another in path-slot order on the single stream. */
      for (std::size_t w = 0; w < ods.size(); ++w) {
        std::size_t off = network.path_offset(w);
        std::size_t n_w = ods[w].paths.size();
        std::vector<long> moved(n_w, 0);
        for (std::size_t p = 0; p < n_w; ++p) {
          long stay = counts[off + p];
          for (long a = 0; a < stay; ++a) {
            if (!rng.bernoulli(eta)) continue;
            double best = -kInf;
            std::size_t argbest = 0;
            std::size_t ties = 0;
            for (std::size_t q = 0; q < n_w; ++q) {
              double score = -costs[off + q] + gumbel_sample(config.gamma, rng);
              if (score > best) {
                best = score;
                argbest = q;
                ties = 1;
              } else if (score == best) {
                ++ties;
                if (rng.index(ties) == 0) argbest = q;
              }
            }
            moved[p] -= 1;
            moved[argbest] += 1;
          }
        }
        for (std::size_t p = 0; p < n_w; ++p) counts[off + p] += moved[p];
      }
      x = flows_now();
    }

    for (std::size_t i = 0; i < x.size(); ++i) sum[i] += x[i];
  }

  record.final_flows = x;
  record.average_flows = sum;
  for (double& v : record.average_flows) {
    v /= static_cast<double>(config.ticks);
  }
  record.wall_seconds = seconds_since(t0);
  return record;
}

double conjugate_sigma(const Edge& edge, double t) {
  if (edge.rho == 0.0) {
    if (std::abs(t - edge.t0) > kPinTol * std::max(1.0, edge.t0)) {
      throw std::domain_error("conjugate_sigma: edge '" + edge.id +
                              "': constant-cost link admits only t = t0");
    }
    return 0.0;
  }
  if (t < edge.t0 * (1.0 - kPinTol)) {
    throw std::domain_error("conjugate_sigma: edge '" + edge.id +
                            "': time below the free-flow floor");
  }
  double dt = std::max(0.0, t - edge.t0);
  return edge.fbar * std::pow(dt / (edge.t0 * edge.rho), edge.mu) * dt /
         (1.0 + edge.mu);
}

double conjugate_sigma_prime(const Edge& edge, double t) {
  if (edge.rho == 0.0) return 0.0;  /* pinned coordinate, kept fixed */
  return edge_delay_inverse(edge, t);
}

DualEval smoothed_dual_objective(const RoadNetwork& network,
                                 std::span<const double> times, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument(
        "smoothed_dual_objective: gamma must be positive");
  }
  require_time_domain(network, times, "smoothed_dual_objective");

  std::vector<double> c = path_costs_from_times(network, times);
  const auto& ods = network.od_pairs();
  double value = 0.0;
  for (std::size_t w = 0; w < ods.size(); ++w) {
    std::size_t off = network.path_offset(w);
    std::size_t n_w = ods[w].paths.size();
    double lo = kInf;
    for (std::size_t i = 0; i < n_w; ++i) lo = std::min(lo, c[off + i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_w; ++i) {
      acc += std::exp(-(c[off + i] - lo) / gamma);
    }
    value += ods[w].demand * (-lo + gamma * std::log(acc));
  }
  for (std::size_t e = 0; e < network.edges().size(); ++e) {
    value += conjugate_sigma(network.edges()[e], times[e]);
  }

  std::vector<double> x = recover_path_flows(network, times, gamma);
  std::vector<double> f = edge_flows(network, x);
  DualEval out;
  out.value = value;
  out.gradient.resize(network.edges().size());
  for (std::size_t e = 0; e < network.edges().size(); ++e) {
    const Edge& edge = network.edges()[e];
    out.gradient[e] =
        edge.rho == 0.0 ? 0.0 : conjugate_sigma_prime(edge, times[e]) - f[e];
  }
  return out;
}

double fixed_point_residual(const RoadNetwork& network,
                            std::span<const double> times, double gamma) {
  require_time_domain(network, times, "fixed_point_residual");
  std::vector<double> x = recover_path_flows(network, times, gamma);
  std::vector<double> f = edge_flows(network, x);
  double m = 0.0;
  for (std::size_t e = 0; e < network.edges().size(); ++e) {
    const Edge& edge = network.edges()[e];
    if (edge.rho == 0.0) continue;  /* any flow is compatible with t = t0 */
    m = std::max(m, std::abs(edge_delay_inverse(edge, times[e]) - f[e]));
  }
  return m;
}

DualState solve_dual(const RoadNetwork& network, double gamma, double tol,
                     long max_iters, DualMethod method, long trace_stride) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("solve_dual: gamma must be positive");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("solve_dual: tol must be positive");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("solve_dual: max_iters must be >= 1");
  }

  DualState state;
  state.gamma = gamma;

  std::vector<double> f;
  if (method == DualMethod::fixed_point) {
    f = edge_flows(network, network.uniform_path_flows());
    for (long m = 0; m < max_iters; ++m) {
      std::vector<double> mapped = chain_map(network, f, gamma);
      double residual = max_abs_diff(mapped, f);
      if (trace_stride > 0 && m % trace_stride == 0) {
        state.trace_steps.push_back(m);
        state.trace_residuals.push_back(residual);
      }
      state.iterations = m + 1;
      if (residual <= tol) {
        state.converged = true;
        break;
      }
      double beta = 1.0 / static_cast<double>(m + 1);
      for (std::size_t e = 0; e < f.size(); ++e) {
        f[e] = (1.0 - beta) * f[e] + beta * mapped[e];
      }
    }
  } else {
    /* Projected gradient on link times with Armijo backtracking, scaled per
     * coordinate by a curvature bound H_e = sigma*''(t_e) + logit curvature.
     * The conjugate curvature 1/tau'(f) blows up toward the free-flow floor
     * for mu < 1, which would stall a uniformly scaled step; dividing by it
     * instead turns the motion into a unit flow-space step there. The flow
     * argument is floored so a coordinate parked exactly at t0 can leave. */
    f = edge_flows(network, network.uniform_path_flows());
    std::vector<double> t = link_times(network, f);
    DualEval eval = smoothed_dual_objective(network, t, gamma);
    const auto& edges = network.edges();
    const auto& ods = network.od_pairs();
    std::vector<double> logit_curv(edges.size(), 0.0);
    for (std::size_t w = 0; w < ods.size(); ++w) {
      std::vector<bool> touched(edges.size(), false);
      for (const auto& path : ods[w].paths) {
        for (std::size_t e : path) touched[e] = true;
      }
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (touched[e]) logit_curv[e] += ods[w].demand / (4.0 * gamma);
      }
    }
    double step = 1.0;
    /* The value-guided steps are not monotone in the chain residual (its
     * sensitivity to a time is 1/tau', huge near free flow), so keep the
     * best-residual iterate seen. */
    std::vector<double> best_t = t;
    double best_residual = kInf;
    for (long m = 0; m < max_iters; ++m) {
      double residual = fixed_point_residual(network, t, gamma);
      if (residual < best_residual) {
        best_residual = residual;
        best_t = t;
      }
      if (trace_stride > 0 && m % trace_stride == 0) {
        state.trace_steps.push_back(m);
        state.trace_residuals.push_back(residual);
      }
      state.iterations = m + 1;
      if (residual <= tol) {
        state.converged = true;
        break;
      }
      std::vector<double> scale(t.size(), 0.0);
      for (std::size_t e = 0; e < t.size(); ++e) {
        const Edge& edge = edges[e];
        if (edge.rho == 0.0) continue;  /* pinned at t0 */
        double g = std::max(edge_delay_inverse(edge, t[e]), 1e-4 * edge.fbar);
        double slope = edge.t0 * edge.rho * (1.0 / edge.mu) *
                       std::pow(g / edge.fbar, 1.0 / edge.mu - 1.0) / edge.fbar;
        scale[e] = 1.0 / (1.0 / slope + logit_curv[e]);
      }
      bool moved = false;
      for (int half = 0; half < 60 && !moved; ++half) {
        std::vector<double> cand(t.size());
        double predicted = 0.0;  /* <grad, cand - t>, nonpositive */
        for (std::size_t e = 0; e < t.size(); ++e) {
          const Edge& edge = edges[e];
          cand[e] = edge.rho == 0.0
                        ? edge.t0
                        : std::max(edge.t0,
                                   t[e] - step * scale[e] * eval.gradient[e]);
          predicted += eval.gradient[e] * (cand[e] - t[e]);
        }
        DualEval cand_eval = smoothed_dual_objective(network, cand, gamma);
        if (cand_eval.value <= eval.value + 1e-4 * predicted) {
          t = std::move(cand);
          eval = std::move(cand_eval);
          step = std::min(step * 2.0, 1.0);  /* recover from halvings */
          moved = true;
        } else {
          step *= 0.5;
        }
      }
      if (!moved) break;  /* stalled at numeric resolution */
    }
    state.times = std::move(best_t);
    state.path_flows = recover_path_flows(network, state.times, gamma);
    state.edge_flows = edge_flows(network, state.path_flows);
    state.residual = fixed_point_residual(network, state.times, gamma);
    state.converged = state.residual <= tol;
    return state;
  }

  state.times = link_times(network, f);
  state.path_flows = recover_path_flows(network, state.times, gamma);
  state.edge_flows = edge_flows(network, state.path_flows);
  state.residual = max_abs_diff(state.edge_flows, f);
  if (!state.converged) {
    /* Residual of the final averaged point, for the non-convergence report. */
    state.converged = state.residual <= tol;
  }
  return state;
}

WardropReport wardrop_check(const RoadNetwork& network,
                            std::span<const double> x, double usage_frac,
                            double tol) {
  network.require_path_flow(x, "wardrop_check");
  if (!(usage_frac > 0.0) || !(usage_frac < 1.0)) {
    throw std::invalid_argument(
        "wardrop_check: usage fraction must lie in (0, 1)");
  }
  std::vector<double> c = path_costs(network, x);
  WardropReport report;
  report.usage_threshold = usage_frac;
  report.tolerance = tol;
  report.worst_slack = kInf;
  report.min_unused_cost = kInf;

  const auto& ods = network.od_pairs();
  for (std::size_t w = 0; w < ods.size(); ++w) {
    std::size_t off = network.path_offset(w);
    std::size_t n_w = ods[w].paths.size();
    double used_max = -kInf;
    double unused_min = kInf;
    for (std::size_t p = 0; p < n_w; ++p) {
      if (x[off + p] >= usage_frac * ods[w].demand) {
        used_max = std::max(used_max, c[off + p]);
      } else {
        unused_min = std::min(unused_min, c[off + p]);
      }
    }
    double slack = unused_min - used_max;  /* inf when every path is used */
    if (slack < report.worst_slack) {
      report.worst_slack = slack;
      report.worst_od = w;
      report.max_used_cost = used_max;
      report.min_unused_cost = unused_min;
    }
  }
  report.satisfied = report.worst_slack >= -tol;
  return report;
}

RoadNetwork random_small_network(std::uint64_t seed) {
  Rng rng(seed);
  auto draw_edge = [&rng](const char* id, const char* tail, const char* head) {
    Edge e;
    e.id = id;
    e.tail = tail;
    e.head = head;
    e.t0 = 0.5 + 1.5 * rng.uniform();
    e.rho = 0.2 + 0.8 * rng.uniform();
    constexpr double kExponents[] = {1.0, 0.5, 0.25};
    e.mu = kExponents[rng.index(3)];
    e.fbar = 0.6 + 1.4 * rng.uniform();
    return e;
  };
  std::vector<Edge> edges;
  edges.push_back(draw_edge("01", "0", "1"));  /* index 0 */
  edges.push_back(draw_edge("02", "0", "2"));  /* index 1 */
  edges.push_back(draw_edge("03", "0", "3"));  /* index 2 */
  edges.push_back(draw_edge("12", "1", "2"));  /* index 3 */
  edges.push_back(draw_edge("13", "1", "3"));  /* index 4 */
  edges.push_back(draw_edge("23", "2", "3"));  /* index 5 */

  OdPair full;
  full.origin = "0";
  full.dest = "3";
  full.demand = 0.5 + 1.5 * rng.uniform();
  full.paths = {{2}, {0, 4}, {1, 5}, {0, 3, 5}};

  OdPair side;
  side.origin = "1";
  side.dest = "3";
  side.demand = 0.5 + 1.5 * rng.uniform();
  side.paths = {{4}, {3, 5}};

  return RoadNetwork({"0", "1", "2", "3"}, std::move(edges), {full, side});
}

}  // namespace smdkit
