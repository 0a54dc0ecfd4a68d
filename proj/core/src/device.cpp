// Copyright 2026 The nestvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nest/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nest/error.hpp"
#include "nest/paths.hpp"

namespace nest {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_probability(double p, const char* field, const std::string& where) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ValidationError(field, where + ": " + field + "=" + std::to_string(p) +
                                     " outside [0,1)");
  }
}

void check_positive(double x, const char* field, const std::string& where) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ValidationError(field, where + ": " + field + "=" + std::to_string(x) +
                                     " must be positive");
  }
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj,
                               int source, int max_depth = kDisconnected) {
  std::vector<int> dist(adj.size(), kDisconnected);
  std::queue<int> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    int q = frontier.front();
    frontier.pop();
    if (dist[q] >= max_depth) continue;
    for (int r : adj[q]) {
      if (dist[r] == kDisconnected) {
        dist[r] = dist[q] + 1;
        frontier.push(r);
      }
    }
  }
  return dist;
}

}  // namespace

DeviceSnapshot::DeviceSnapshot(std::string name, int num_qubits,
                               std::vector<QubitProps> qubits,
                               std::vector<std::pair<Edge, EdgeProps>> edges,
                               std::string calibration_date)
    : name_(std::move(name)),
      num_qubits_(num_qubits),
      date_(std::move(calibration_date)),
      qubits_(std::move(qubits)) {
  if (num_qubits_ < 1) {
    throw ValidationError("num_qubits", "num_qubits must be at least 1");
  }
  if (static_cast<int>(qubits_.size()) != num_qubits_) {
    throw ValidationError("qubits", "expected " + std::to_string(num_qubits_) +
                                        " qubit entries, got " +
                                        std::to_string(qubits_.size()));
  }
  for (int q = 0; q < num_qubits_; ++q) {
    const auto& p = qubits_[q];
    const std::string where = "qubit " + std::to_string(q);
    check_positive(p.t1_us, "t1_us", where);
    check_positive(p.t2_us, "t2_us", where);
    check_probability(p.readout_error, "readout_error", where);
    check_probability(p.sq_error, "sq_error", where);
    check_positive(p.sq_duration_us, "sq_duration_us", where);
  }

  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  adjacency_.assign(num_qubits_, {});
  for (const auto& [e, props] : edges) {
    const std::string where =
        "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
    if (e.u < 0 || e.v >= num_qubits_) {
      throw ValidationError("edges", where + " references an invalid qubit");
    }
    if (e.u == e.v) throw ValidationError("edges", where + " is a self-loop");
    if (!edges_.empty() && edges_.back() == e) {
      throw ValidationError("edges", where + " is duplicated");
    }
    check_probability(props.tq_error, "tq_error", where);
    check_positive(props.tq_duration_us, "tq_duration_us", where);
    edge_index_.emplace(key(e.u, e.v), edges_.size());
    edges_.push_back(e);
    edge_props_.push_back(props);
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::uint64_t DeviceSnapshot::key(PhysicalQubit a, PhysicalQubit b) noexcept {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

const QubitProps& DeviceSnapshot::qubit(PhysicalQubit q) const {
  if (q < 0 || q >= num_qubits_) {
    throw IndexError("qubit index " + std::to_string(q) + " out of range");
  }
  return qubits_[q];
}

bool DeviceSnapshot::has_edge(PhysicalQubit a, PhysicalQubit b) const noexcept {
  return find_edge(a, b) != nullptr;
}

const EdgeProps* DeviceSnapshot::find_edge(PhysicalQubit a,
                                           PhysicalQubit b) const noexcept {
  auto it = edge_index_.find(key(a, b));
  return it == edge_index_.end() ? nullptr : &edge_props_[it->second];
}

std::span<const PhysicalQubit> DeviceSnapshot::neighbors(PhysicalQubit q) const {
  if (q < 0 || q >= num_qubits_) {
    throw IndexError("qubit index " + std::to_string(q) + " out of range");
  }
  return adjacency_[q];
}

std::vector<int> DeviceSnapshot::distances_from(PhysicalQubit source) const {
  if (source < 0 || source >= num_qubits_) {
    throw IndexError("qubit index " + std::to_string(source) + " out of range");
  }
  return bfs_distances(adjacency_, source);
}

bool operator==(const DeviceSnapshot& a, const DeviceSnapshot& b) {
  return a.name_ == b.name_ && a.num_qubits_ == b.num_qubits_ &&
         a.date_ == b.date_ && a.qubits_ == b.qubits_ && a.edges_ == b.edges_ &&
         a.edge_props_ == b.edge_props_;
}

int coupling_distance(const DeviceSnapshot& snapshot, PhysicalQubit u,
                      PhysicalQubit v) {
  if (v < 0 || v >= snapshot.num_qubits()) {
    throw IndexError("qubit index " + std::to_string(v) + " out of range");
  }
  if (u == v) {
    snapshot.qubit(u);
    return 0;
  }
  return snapshot.distances_from(u)[v];
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

double get_number(const ordered_json& obj, const char* field,
                  const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(where + ": missing numeric field '" + field + "'");
  }
  return it->get<double>();
}

}  // namespace

DeviceSnapshot parse_snapshot(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("snapshot JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("snapshot JSON must be an object");

  try {
    const std::string name = doc.value("name", std::string{});
    if (!doc.contains("num_qubits") || !doc["num_qubits"].is_number_integer()) {
      throw ParseError("snapshot: missing integer 'num_qubits'");
    }
    const int num_qubits = doc["num_qubits"].get<int>();
    const std::string date = doc.value("calibration_date", std::string{});

    if (!doc.contains("qubits") || !doc["qubits"].is_array()) {
      throw ParseError("snapshot: missing array 'qubits'");
    }
    std::vector<QubitProps> qubits;
    for (std::size_t i = 0; i < doc["qubits"].size(); ++i) {
      const auto& q = doc["qubits"][i];
      const std::string where = "qubit " + std::to_string(i);
      if (!q.is_object()) throw ParseError(where + ": expected an object");
      qubits.push_back({get_number(q, "t1_us", where), get_number(q, "t2_us", where),
                        get_number(q, "readout_error", where),
                        get_number(q, "sq_error", where),
                        get_number(q, "sq_duration_us", where)});
    }

    std::vector<Edge> edge_list;
    for (const auto& e : doc.value("edges", ordered_json::array())) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer()) {
        throw ParseError("snapshot: edges must be [u, v] integer pairs");
      }
      edge_list.emplace_back(e[0].get<int>(), e[1].get<int>());
    }

    std::vector<std::pair<Edge, EdgeProps>> edges;
    std::vector<bool> covered(edge_list.size(), false);
    for (const auto& p : doc.value("edge_props", ordered_json::array())) {
      if (!p.is_object() || !p.contains("u") || !p.contains("v")) {
        throw ParseError("snapshot: edge_props entries need u and v");
      }
      Edge e(p["u"].get<int>(), p["v"].get<int>());
      const std::string where =
          "edge_props (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
      auto it = std::find(edge_list.begin(), edge_list.end(), e);
      if (it == edge_list.end()) {
        throw ValidationError("edge_props", where + " has no matching edge");
      }
      auto idx = static_cast<std::size_t>(it - edge_list.begin());
      if (covered[idx]) throw ValidationError("edge_props", where + " is duplicated");
      covered[idx] = true;
      edges.push_back({e, {get_number(p, "tq_error", where),
                           get_number(p, "tq_duration_us", where)}});
    }
    for (std::size_t i = 0; i < edge_list.size(); ++i) {
      if (!covered[i]) {
        // Duplicate edges in 'edges' surface here as uncovered entries.
        auto first = std::find(edge_list.begin(), edge_list.end(), edge_list[i]);
        if (static_cast<std::size_t>(first - edge_list.begin()) != i) {
          throw ValidationError("edges", "duplicate edge in snapshot");
        }
        throw ValidationError("edge_props",
                              "edge (" + std::to_string(edge_list[i].u) + "," +
                                  std::to_string(edge_list[i].v) +
                                  ") has no edge_props entry");
      }
    }
    return DeviceSnapshot(name, num_qubits, std::move(qubits), std::move(edges),
                          date);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("snapshot JSON: ") + e.what());
  }
}

std::string snapshot_to_json(const DeviceSnapshot& s) {
  ordered_json doc;
  doc["name"] = s.name();
  doc["num_qubits"] = s.num_qubits();
  doc["calibration_date"] = s.calibration_date();
  doc["edges"] = ordered_json::array();
  for (const auto& e : s.edges()) doc["edges"].push_back({e.u, e.v});
  doc["qubits"] = ordered_json::array();
  for (const auto& q : s.qubits()) {
    doc["qubits"].push_back({{"t1_us", q.t1_us},
                             {"t2_us", q.t2_us},
                             {"readout_error", q.readout_error},
                             {"sq_error", q.sq_error},
                             {"sq_duration_us", q.sq_duration_us}});
  }
  doc["edge_props"] = ordered_json::array();
  for (std::size_t i = 0; i < s.edges().size(); ++i) {
    const auto& e = s.edges()[i];
    const auto& p = s.edge_props()[i];
    doc["edge_props"].push_back({{"u", e.u},
                                 {"v", e.v},
                                 {"tq_error", p.tq_error},
                                 {"tq_duration_us", p.tq_duration_us}});
  }
  return doc.dump(2) + "\n";
}

DeviceSnapshot load_snapshot(const std::filesystem::path& path) {
  auto resolved = resolve_data_path(path);
  if (!std::filesystem::exists(resolved)) {
    throw ParseError("snapshot file not found: " + path.string());
  }
  return parse_snapshot(read_text_file(resolved));
}

namespace {

SyntheticDeviceSpec synthetic_from_json(const ordered_json& doc) {
  if (!doc.is_object()) throw ParseError("synthetic spec must be an object");
  for (const auto& [key, val] : doc.items()) {
    if (key != "name" && key != "topology" && key != "noise") {
      throw InvalidSpec("unknown synthetic spec key '" + key + "'");
    }
  }
  SyntheticDeviceSpec spec;
  spec.name = doc.value("name", spec.name);
  const auto topo = doc.find("topology");
  if (topo == doc.end()) throw ParseError("synthetic spec: missing 'topology'");
  if (topo->is_string()) {
    const auto t = topo->get<std::string>();
    if (t == "heavy_hex_27") spec.topology = Topology::heavy_hex_27();
    else if (t == "heavy_hex_127") spec.topology = Topology::heavy_hex_127();
    else throw InvalidSpec("unknown topology preset '" + t + "'");
  } else if (topo->is_object() && topo->size() == 1) {
    const auto& [key, val] = *topo->items().begin();
    if (key == "path" || key == "ring") {
      if (!val.is_number_integer()) throw ParseError("topology size must be an integer");
      spec.topology = key == "path" ? Topology::path(val.get<int>()) : Topology::ring(val.get<int>());
    } else if (key == "edge_file" && val.is_string()) {
      spec.topology = Topology::edge_file(val.get<std::string>());
    } else {
      throw InvalidSpec("unknown topology '" + key + "'");
    }
  } else {
    throw ParseError("synthetic spec: bad 'topology'");
  }

  NoiseProfile& n = spec.noise;
  const ordered_json noise = doc.value("noise", ordered_json::object());
  if (!noise.is_object()) throw ParseError("synthetic spec: 'noise' must be an object");
  for (const auto& [key, val] : noise.items()) {
    auto range = [&](Range& r) {
      if (!val.is_array() || val.size() != 2 || !val[0].is_number() || !val[1].is_number()) {
        throw ParseError("noise." + key + " must be [lo, hi]");
      }
      r = {val[0].get<double>(), val[1].get<double>()};
    };
    auto number = [&]() {
      if (!val.is_number()) throw ParseError("noise." + key + " must be a number");
      return val.get<double>();
    };
    if (key == "seed") {
      if (!val.is_number_unsigned()) throw ParseError("noise.seed must be a non-negative integer");
      n.seed = val.get<std::uint64_t>();
    } else if (key == "sq_error_range") range(n.sq_error);
    else if (key == "tq_error_range") range(n.tq_error);
    else if (key == "readout_range") range(n.readout);
    else if (key == "t1_range_us") range(n.t1_us);
    else if (key == "t2_range_us") range(n.t2_us);
    else if (key == "sq_duration_range_us") range(n.sq_duration_us);
    else if (key == "tq_duration_range_us") range(n.tq_duration_us);
    else if (key == "spatial_correlation") n.spatial_correlation = number();
    else if (key == "correlation_length") n.correlation_length = number();
    else throw InvalidSpec("unknown noise key '" + key + "'");
  }
  return spec;
}

ordered_json parse_json_text(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

SyntheticDeviceSpec parse_synthetic_spec(const std::string& json_text) {
  return synthetic_from_json(parse_json_text(json_text, "synthetic spec JSON"));
}

DeviceSnapshot load_device(const std::filesystem::path& path) {
  auto resolved = resolve_data_path(path);
  if (!std::filesystem::exists(resolved)) {
    throw ParseError("device file not found: " + path.string());
  }
  const std::string text = read_text_file(resolved);
  const ordered_json doc = parse_json_text(text, "device JSON");
  if (doc.is_object() && doc.contains("synthetic")) {
    return synthesize_device(synthetic_from_json(doc["synthetic"]));
  }
  return parse_snapshot(text);
}

void save_snapshot(const DeviceSnapshot& snapshot,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot: " + path.string());
  out << snapshot_to_json(snapshot);
}

std::vector<Edge> parse_edge_list(const std::string& text) {
  std::vector<Edge> edges;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) continue;
    std::string rest;
    if (!(ls >> v) || (ls >> rest) || u < 0 || v < 0) {
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": expected 'u v'");
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return edges;
}

std::vector<Edge> load_edge_list(const std::filesystem::path& path) {
  return parse_edge_list(read_text_file(resolve_data_path(path)));
}

// ---------------------------------------------------------------------------
// Synthetic devices
// ---------------------------------------------------------------------------

std::vector<Edge> topology_edges(const Topology& topology, int* num_qubits) {
  std::vector<Edge> edges;
  int q = topology.num_qubits;
  switch (topology.kind) {
    case TopologyKind::Path:
    case TopologyKind::Ring:
      if (q < 1) throw InvalidSpec("path/ring topology needs at least 1 qubit");
      for (int i = 0; i + 1 < q; ++i) edges.emplace_back(i, i + 1);
      if (topology.kind == TopologyKind::Ring) {
        if (q < 3) throw InvalidSpec("ring topology needs at least 3 qubits");
        edges.emplace_back(0, q - 1);
      }
      break;
    case TopologyKind::HeavyHex27:
    case TopologyKind::HeavyHex127:
    case TopologyKind::EdgeFile: {
      std::filesystem::path file = topology.file;
      if (topology.kind == TopologyKind::HeavyHex27) {
        file = "topologies/heavy_hex_27.txt";
      } else if (topology.kind == TopologyKind::HeavyHex127) {
        file = "topologies/heavy_hex_127.txt";
      }
      try {
        edges = load_edge_list(file);
      } catch (const ParseError& e) {
        throw InvalidSpec(e.what());
      }
      q = 0;
      for (const auto& e : edges) q = std::max(q, e.v + 1);
      break;
    }
  }
  if (num_qubits) *num_qubits = q;
  return edges;
}

namespace {

void check_range(const Range& r, const char* field, bool probability) {
  const bool ok = std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi &&
                  (probability ? (r.lo >= 0.0 && r.hi < 1.0) : r.lo > 0.0);
  if (!ok) throw InvalidSpec(std::string("invalid range for ") + field);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

class LatentField {
 public:
  LatentField(const std::vector<std::vector<int>>& adj, double length)
      : adj_(adj), length_(length), radius_(static_cast<int>(std::ceil(3 * length))) {
    dist_.reserve(adj.size());
    for (std::size_t q = 0; q < adj.size(); ++q) {
      dist_.push_back(bfs_distances(adj, static_cast<int>(q), radius_));
    }
  }

  /// Unit-variance smoothed field over qubits built from iid normals `u`.
  std::vector<double> at_qubits(const std::vector<double>& u) const {
    std::vector<double> out(adj_.size());
    for (std::size_t q = 0; q < adj_.size(); ++q) {
      double s = 0.0, w2 = 0.0;
      for (std::size_t p = 0; p < adj_.size(); ++p) {
        int d = dist_[q][p];
        if (d > radius_) continue;
        double w = weight(d);
        s += w * u[p];
        w2 += w * w;
      }
      out[q] = s / std::sqrt(w2);
    }
    return out;
  }

  /// Same field evaluated at edge midpoints.
  std::vector<double> at_edges(const std::vector<Edge>& edges,
                               const std::vector<double>& u) const {
    std::vector<double> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
      double s = 0.0, w2 = 0.0;
      for (std::size_t p = 0; p < adj_.size(); ++p) {
        int d = std::min(dist_[e.u][p], dist_[e.v][p]);
        if (d > radius_) continue;
        double w = weight(d + 0.5);
        s += w * u[p];
        w2 += w * w;
      }
      out.push_back(s / std::sqrt(w2));
    }
    return out;
  }

 private:
  double weight(double d) const {
    return std::exp(-d * d / (2.0 * length_ * length_));
  }

  const std::vector<std::vector<int>>& adj_;
  double length_;
  int radius_;
  std::vector<std::vector<int>> dist_;
};

}  // namespace

DeviceSnapshot synthesize_device(const SyntheticDeviceSpec& spec) {
  const auto& noise = spec.noise;
  check_range(noise.sq_error, "sq_error_range", true);
  check_range(noise.tq_error, "tq_error_range", true);
  check_range(noise.readout, "readout_range", true);
  check_range(noise.t1_us, "t1_range_us", false);
  check_range(noise.t2_us, "t2_range_us", false);
  check_range(noise.sq_duration_us, "sq_duration_range_us", false);
  check_range(noise.tq_duration_us, "tq_duration_range_us", false);
  if (!(noise.spatial_correlation >= 0.0 && noise.spatial_correlation <= 1.0)) {
    throw InvalidSpec("spatial_correlation must lie in [0,1]");
  }
  if (!(noise.correlation_length > 0.0)) {
    throw InvalidSpec("correlation_length must be positive");
  }

  int q = 0;
  std::vector<Edge> edges = topology_edges(spec.topology, &q);
  std::sort(edges.begin(), edges.end());
  std::vector<std::vector<int>> adj(q);
  for (const auto& e : edges) {
    if (e.v >= q || e.u == e.v) throw InvalidSpec("topology has an invalid edge");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto iid = [&](std::size_t count) {
    std::vector<double> v(count);
    for (auto& x : v) x = normal(rng);
    return v;
  };

  const double rho = noise.spatial_correlation;
  const double a = std::sqrt(rho);
  const double b = std::sqrt(1.0 - rho);
  LatentField field(adj, noise.correlation_length);

  auto qubit_draw = [&](const Range& r) {
    auto smooth = field.at_qubits(iid(q));
    auto local = iid(q);
    std::vector<double> out(q);
    for (int i = 0; i < q; ++i) {
      out[i] = r.lo + normal_cdf(a * smooth[i] + b * local[i]) * (r.hi - r.lo);
    }
    return out;
  };
  auto edge_draw = [&](const Range& r) {
    auto smooth = field.at_edges(edges, iid(q));
    auto local = iid(edges.size());
    std::vector<double> out(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      out[i] = r.lo + normal_cdf(a * smooth[i] + b * local[i]) * (r.hi - r.lo);
    }
    return out;
  };

  auto sq = qubit_draw(noise.sq_error);
  auto ro = qubit_draw(noise.readout);
  auto t1 = qubit_draw(noise.t1_us);
  auto t2 = qubit_draw(noise.t2_us);
  auto sqd = qubit_draw(noise.sq_duration_us);
  auto tq = edge_draw(noise.tq_error);
  auto tqd = edge_draw(noise.tq_duration_us);

  std::vector<QubitProps> qubits(q);
  for (int i = 0; i < q; ++i) qubits[i] = {t1[i], t2[i], ro[i], sq[i], sqd[i]};
  std::vector<std::pair<Edge, EdgeProps>> edge_props;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edge_props.push_back({edges[i], {tq[i], tqd[i]}});
  }
  return DeviceSnapshot(spec.name, q, std::move(qubits), std::move(edge_props),
                        "synthetic-seed-" + std::to_string(noise.seed));
}

}  // namespace nest
