#pragma once

#include <string>

#include "smdkit/traffic.hpp"

namespace smdkit {

/* Network files are JSON:
 *   { "nodes": [id, ...],
 *     "edges": [{"id", "tail", "head", "t0", "rho", "mu", "fbar"}, ...],
 *     "od_pairs": [{"origin", "dest", "demand", "paths": [[edge id, ...], ...]}] }
 * Ids may be strings or integers; integers are canonicalized to their decimal
 * spelling. Structural problems are reported with the offending element's
 * position. */
RoadNetwork parse_network(const std::string& text,
                          const std::string& source_name);
RoadNetwork load_network(const std::string& path);

}  // namespace smdkit
