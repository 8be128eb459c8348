#include "smdkit/traffic_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace smdkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw std::runtime_error(source + ": " + what);
}

std::string id_string(const json& v, const std::string& source,
                      const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(source, where + ": id must be a string or integer");
}

double number_field(const json& obj, const char* key, const std::string& source,
                    const std::string& where) {
  if (!obj.contains(key)) fail(source, where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(source, where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

const json& array_field(const json& obj, const char* key,
                        const std::string& source, const std::string& where) {
  if (!obj.contains(key)) fail(source, where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_array()) fail(source, where + ": field '" + key + "' must be an array");
  return v;
}

}  // namespace

RoadNetwork parse_network(const std::string& text,
                          const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source_name, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(source_name, "top level must be an object");

  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < array_field(doc, "nodes", source_name, "top level").size(); ++i) {
    nodes.push_back(id_string(doc["nodes"][i], source_name,
                              "nodes[" + std::to_string(i) + "]"));
  }

  std::vector<Edge> edges;
  std::unordered_map<std::string, std::size_t> edge_index;
  const json& jedges = array_field(doc, "edges", source_name, "top level");
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    std::string where = "edges[" + std::to_string(i) + "]";
    const json& je = jedges[i];
    if (!je.is_object()) fail(source_name, where + ": must be an object");
    Edge e;
    if (!je.contains("id")) fail(source_name, where + ": missing field 'id'");
    e.id = id_string(je.at("id"), source_name, where);
    if (!je.contains("tail")) fail(source_name, where + ": missing field 'tail'");
    e.tail = id_string(je.at("tail"), source_name, where);
    if (!je.contains("head")) fail(source_name, where + ": missing field 'head'");
    e.head = id_string(je.at("head"), source_name, where);
    e.t0 = number_field(je, "t0", source_name, where);
    e.rho = number_field(je, "rho", source_name, where);
    e.mu = number_field(je, "mu", source_name, where);
    e.fbar = number_field(je, "fbar", source_name, where);
    if (edge_index.count(e.id)) {
      fail(source_name, where + ": duplicate edge id '" + e.id + "'");
    }
    edge_index[e.id] = edges.size();
    edges.push_back(std::move(e));
  }

  std::vector<OdPair> ods;
  const json& jods = array_field(doc, "od_pairs", source_name, "top level");
  for (std::size_t i = 0; i < jods.size(); ++i) {
    std::string where = "od_pairs[" + std::to_string(i) + "]";
    const json& jo = jods[i];
    if (!jo.is_object()) fail(source_name, where + ": must be an object");
    OdPair od;
    if (!jo.contains("origin")) fail(source_name, where + ": missing field 'origin'");
    od.origin = id_string(jo.at("origin"), source_name, where);
    if (!jo.contains("dest")) fail(source_name, where + ": missing field 'dest'");
    od.dest = id_string(jo.at("dest"), source_name, where);
    od.demand = number_field(jo, "demand", source_name, where);
    const json& jpaths = array_field(jo, "paths", source_name, where);
    for (std::size_t p = 0; p < jpaths.size(); ++p) {
      std::string pwhere = where + ".paths[" + std::to_string(p) + "]";
      if (!jpaths[p].is_array()) fail(source_name, pwhere + ": must be an array");
      std::vector<std::size_t> path;
      for (std::size_t s = 0; s < jpaths[p].size(); ++s) {
        std::string id = id_string(jpaths[p][s], source_name,
                                   pwhere + "[" + std::to_string(s) + "]");
        auto it = edge_index.find(id);
        if (it == edge_index.end()) {
          fail(source_name, pwhere + "[" + std::to_string(s) +
                                "]: unknown edge id '" + id + "'");
        }
        path.push_back(it->second);
      }
      od.paths.push_back(std::move(path));
    }
    ods.push_back(std::move(od));
  }

  try {
    return RoadNetwork(std::move(nodes), std::move(edges), std::move(ods));
  } catch (const std::invalid_argument& e) {
    fail(source_name, e.what());
  }
}

RoadNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open network file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str(), path);
}

}  // namespace smdkit
