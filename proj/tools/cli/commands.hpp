#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "smdkit/prox.hpp"

namespace smdkit::cli {

/* Exit policy: 0 on success, 1 when a run aborted, 2 on an invalid config
 * (message names the offending flag). Check-style commands (bench, traffic
 * check) exit with the number of failed checks. */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailure {
  int failed = 0;
};

void register_smd(CLI::App& app);
void register_zo(CLI::App& app);
void register_online(CLI::App& app);
void register_traffic(CLI::App& app);
void register_bench(CLI::App& app);

/* Shared flag plumbing. */

inline ProxKind parse_geometry(const std::string& name) {
  if (name == "entropic") return ProxKind::entropic_simplex;
  if (name == "euclidean-simplex") return ProxKind::euclidean_simplex;
  if (name == "euclidean-free") return ProxKind::euclidean_free;
  throw ConfigError("invalid config: --geometry must be entropic, "
                    "euclidean-simplex, or euclidean-free (got " + name + ")");
}

/* Default R with R^2 >= V(x_*, x0) from the geometry's start point: ln n
 * bounds the entropic divergence from the uniform start, 1 covers the
 * simplex in the Euclidean case. The free case is problem-specific and
 * passed in by the caller. */
inline double default_radius(ProxKind kind, std::size_t n) {
  if (kind == ProxKind::entropic_simplex) {
    return n > 1 ? std::sqrt(std::log(static_cast<double>(n))) : 1.0;
  }
  return 1.0;
}

inline long auto_stride(long N) { return N > 100 ? N / 100 : 1; }

/* Attach the long-form help flag and a per-command --config option; the
 * returned string holds the config path once the command line is parsed.
 * Each command's callback hands that path to apply_json_config before it
 * validates anything, so config values behave exactly like flags except
 * that explicit flags win on conflict. */
std::shared_ptr<std::string> attach_common(CLI::App& cmd);
void apply_json_config(CLI::App& cmd, const std::string& path);

}  // namespace smdkit::cli
