#include "sysgraph/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "sysgraph/errors.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {
namespace {

// Out-neighbors with self-loops removed; path metrics all work on this view.
std::vector<std::vector<std::size_t>> simple_out(const SystemCallGraph& g) {
  std::vector<std::vector<std::size_t>> adj(g.node_count());
  for (const auto& e : g.edges())
    if (e.from != e.to) adj[e.from].push_back(e.to);
  return adj;
}

// Unit-length BFS; -1 marks unreachable.
std::vector<std::int64_t> bfs(const std::vector<std::vector<std::size_t>>& adj,
                              std::size_t source) {
  std::vector<std::int64_t> dist(adj.size(), -1);
  std::vector<std::size_t> queue;
  queue.reserve(adj.size());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    for (std::size_t w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

double mean(const std::vector<std::uint64_t>& values) {
  if (values.empty()) return 0.0;
  long double sum = 0.0L;
  for (auto v : values) sum += static_cast<long double>(v);
  return static_cast<double>(sum / static_cast<long double>(values.size()));
}

std::optional<double> normalized_mean(const std::vector<std::uint64_t>& values) {
  const auto max = std::max_element(values.begin(), values.end());
  if (max == values.end() || *max == 0) return std::nullopt;
  long double sum = 0.0L;
  for (auto v : values) sum += static_cast<long double>(v) / static_cast<long double>(*max);
  return static_cast<double>(sum / static_cast<long double>(values.size()));
}

}  // namespace

std::vector<std::uint64_t> degrees(const SystemCallGraph& g, Direction dir, bool weighted) {
  std::vector<std::uint64_t> deg(g.node_count(), 0);
  for (const auto& e : g.edges())
    deg[dir == Direction::in ? e.to : e.from] += weighted ? e.multiplicity : 1;
  return deg;
}

double DegreeHistogram::p(std::uint64_t k) const {
  if (node_count == 0) return 0.0;
  const auto it = counts.find(k);
  return it == counts.end() ? 0.0
                            : static_cast<double>(it->second) / static_cast<double>(node_count);
}

DegreeHistogram degree_distribution(const SystemCallGraph& g, Direction dir, bool weighted) {
  DegreeHistogram hist;
  hist.direction = dir;
  hist.weighted = weighted;
  hist.node_count = g.node_count();
  for (auto d : degrees(g, dir, weighted)) ++hist.counts[d];
  return hist;
}

double avg_degree_centrality(const SystemCallGraph& g, Direction dir, bool weighted,
                             bool normalized) {
  const auto deg = degrees(g, dir, weighted);
  if (!normalized) return mean(deg);
  const auto value = normalized_mean(deg);
  if (!value)
    throw DegenerateNormalizationError("all degrees are zero, cannot normalize");
  return *value;
}

double portion_degree_one(const SystemCallGraph& g, Direction dir, bool weighted) {
  const auto deg = degrees(g, dir, weighted);
  if (deg.empty()) return 0.0;
  const auto ones = std::count(deg.begin(), deg.end(), std::uint64_t{1});
  return static_cast<double>(ones) / static_cast<double>(deg.size());
}

std::vector<double> betweenness(const SystemCallGraph& g) {
  const auto adj = simple_out(g);
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<std::int64_t> dist(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  order.reserve(n);

  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const std::size_t v = order[head];
      for (std::size_t w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }

    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w])
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  return bc;
}

double clustering_coefficient(const SystemCallGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : g.edges())
    if (e.from != e.to) adj[e.from][e.to] = adj[e.to][e.from] = true;

  std::uint64_t closed = 0, triples = 0;
  std::vector<std::size_t> neigh;
  for (std::size_t u = 0; u < n; ++u) {
    neigh.clear();
    for (std::size_t v = 0; v < n; ++v)
      if (adj[u][v]) neigh.push_back(v);
    const std::uint64_t d = neigh.size();
    if (d >= 2) triples += d * (d - 1) / 2;
    for (std::size_t i = 0; i < neigh.size(); ++i)
      for (std::size_t j = i + 1; j < neigh.size(); ++j)
        if (adj[neigh[i]][neigh[j]]) ++closed;
  }
  // closed counts each triangle once per center vertex, i.e. 3 * triangles.
  return triples == 0 ? 0.0 : static_cast<double>(closed) / static_cast<double>(triples);
}

double average_distance(const SystemCallGraph& g) {
  const auto adj = simple_out(g);
  long double sum = 0.0L;
  std::uint64_t pairs = 0;
  for (std::size_t s = 0; s < adj.size(); ++s)
    for (const auto d : bfs(adj, s))
      if (d > 0) {
        sum += static_cast<long double>(d);
        ++pairs;
      }
  if (pairs == 0) throw NoFinitePairsError("no reachable ordered pair of distinct nodes");
  return static_cast<double>(sum / static_cast<long double>(pairs));
}

double network_density(const SystemCallGraph& g) {
  const std::size_t n = g.node_count();
  if (n < 2) throw TooSmallError("density needs at least 2 nodes");
  std::size_t m = 0;
  for (const auto& e : g.edges())
    if (e.from != e.to) ++m;
  return 2.0 * static_cast<double>(m) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::size_t weak_component_count(const SystemCallGraph& g) {
  UnionFind uf(g.node_count());
  for (const auto& e : g.edges()) uf.unite(e.from, e.to);
  std::size_t count = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (uf.find(v) == v) ++count;
  return count;
}

// Iterative Tarjan over the simple projection (self-loops don't change SCCs).
std::size_t scc_count(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, components = 0;

  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  std::vector<Frame> call_stack;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    while (!call_stack.empty()) {
      auto& frame = call_stack.back();
      const std::size_t v = frame.v;
      if (frame.edge == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (frame.edge < adj[v].size()) {
        const std::size_t w = adj[v][frame.edge++];
        if (index[w] == kUnvisited) {
          call_stack.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        ++components;
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          if (w == v) break;
        }
      }
      call_stack.pop_back();
      if (!call_stack.empty())
        lowlink[call_stack.back().v] = std::min(lowlink[call_stack.back().v], lowlink[v]);
    }
  }
  return components;
}

std::size_t h_index_of(const SystemCallGraph& g) {
  auto total = degrees(g, Direction::in, false);
  const auto out = degrees(g, Direction::out, false);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += out[i];
  std::sort(total.begin(), total.end(), std::greater<>{});
  std::size_t h = 0;
  while (h < total.size() && total[h] >= h + 1) ++h;
  return h;
}

}  // namespace

double component_ratio(const SystemCallGraph& g) {
  const std::size_t n = g.node_count();
  if (n < 2) throw TooSmallError("component ratio needs at least 2 nodes");
  return static_cast<double>(weak_component_count(g) - 1) / static_cast<double>(n - 1);
}

GraphExtras extras(const SystemCallGraph& g) {
  GraphExtras ex;
  const auto adj = simple_out(g);
  std::int64_t diameter = -1;
  for (std::size_t s = 0; s < adj.size(); ++s)
    for (const auto d : bfs(adj, s)) diameter = std::max(diameter, d);
  if (diameter <= 0) throw NoFinitePairsError("no reachable ordered pair of distinct nodes");
  ex.diameter = static_cast<std::size_t>(diameter);
  ex.h_index = h_index_of(g);
  ex.strong_components = scc_count(adj);
  return ex;
}

MetricReport compute_metrics(const SystemCallGraph& g, std::string sample_id) {
  if (g.node_count() == 0) throw EmptyGraphError("cannot compute metrics of empty graph");

  MetricReport r;
  r.sample_id = std::move(sample_id);
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  r.total_multiplicity = g.total_multiplicity();

  const auto in_deg = degrees(g, Direction::in, false);
  const auto out_deg = degrees(g, Direction::out, false);
  const auto win_deg = degrees(g, Direction::in, true);
  const auto wout_deg = degrees(g, Direction::out, true);
  const auto bc = betweenness(g);

  r.node_names.reserve(g.node_count());
  r.per_node.reserve(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    r.node_names.push_back(g.node(v).name);
    r.per_node.push_back({in_deg[v], out_deg[v], win_deg[v], wout_deg[v], bc[v]});
  }

  r.avg_in_degree_centrality = mean(in_deg);
  r.avg_out_degree_centrality = mean(out_deg);
  r.avg_weighted_in_degree_centrality = mean(win_deg);
  r.avg_weighted_out_degree_centrality = mean(wout_deg);
  r.avg_normalized_in_degree_centrality = normalized_mean(in_deg);
  r.avg_normalized_out_degree_centrality = normalized_mean(out_deg);
  r.avg_normalized_weighted_in_degree_centrality = normalized_mean(win_deg);
  r.avg_normalized_weighted_out_degree_centrality = normalized_mean(wout_deg);

  const double bc_max = bc.empty() ? 0.0 : *std::max_element(bc.begin(), bc.end());
  if (bc_max > 0.0) {
    long double sum = 0.0L;
    for (double b : bc) sum += static_cast<long double>(b) / bc_max;
    r.avg_normalized_betweenness_centrality =
        static_cast<double>(sum / static_cast<long double>(bc.size()));
  }

  r.portion_in_degree_1 = portion_degree_one(g, Direction::in, false);
  r.portion_out_degree_1 = portion_degree_one(g, Direction::out, false);
  r.portion_weighted_in_degree_1 = portion_degree_one(g, Direction::in, true);
  r.portion_weighted_out_degree_1 = portion_degree_one(g, Direction::out, true);

  r.clustering = clustering_coefficient(g);
  try {
    r.average_distance = average_distance(g);
  } catch (const NoFinitePairsError&) {
  }
  if (g.node_count() >= 2) {
    r.network_density = network_density(g);
    r.component_ratio = component_ratio(g);
  }

  const auto adj = simple_out(g);
  std::int64_t diameter = -1;
  for (std::size_t s = 0; s < adj.size(); ++s)
    for (const auto d : bfs(adj, s)) diameter = std::max(diameter, d);
  if (diameter > 0) r.diameter = static_cast<std::size_t>(diameter);
  r.h_index = h_index_of(g);
  r.strong_components = scc_count(adj);
  return r;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json per_node = nlohmann::json::object();
  for (std::size_t v = 0; v < r.node_names.size(); ++v) {
    const auto& m = r.per_node[v];
    per_node[r.node_names[v]] = {{"in_degree", m.in_degree},
                                 {"out_degree", m.out_degree},
                                 {"weighted_in_degree", m.weighted_in_degree},
                                 {"weighted_out_degree", m.weighted_out_degree},
                                 {"betweenness", m.betweenness}};
  }
  nlohmann::json j{
      {"sample_id", r.sample_id},
      {"nodes", r.node_count},
      {"edges", r.edge_count},
      {"total_multiplicity", r.total_multiplicity},
      {"avg_in_degree_centrality", r.avg_in_degree_centrality},
      {"avg_out_degree_centrality", r.avg_out_degree_centrality},
      {"avg_weighted_in_degree_centrality", r.avg_weighted_in_degree_centrality},
      {"avg_weighted_out_degree_centrality", r.avg_weighted_out_degree_centrality},
      {"avg_normalized_in_degree_centrality", opt_json(r.avg_normalized_in_degree_centrality)},
      {"avg_normalized_out_degree_centrality",
       opt_json(r.avg_normalized_out_degree_centrality)},
      {"avg_normalized_weighted_in_degree_centrality",
       opt_json(r.avg_normalized_weighted_in_degree_centrality)},
      {"avg_normalized_weighted_out_degree_centrality",
       opt_json(r.avg_normalized_weighted_out_degree_centrality)},
      {"avg_normalized_betweenness_centrality",
       opt_json(r.avg_normalized_betweenness_centrality)},
      {"portion_in_degree_1", r.portion_in_degree_1},
      {"portion_out_degree_1", r.portion_out_degree_1},
      {"portion_weighted_in_degree_1", r.portion_weighted_in_degree_1},
      {"portion_weighted_out_degree_1", r.portion_weighted_out_degree_1},
      {"clustering_coefficient", r.clustering},
      {"average_distance", opt_json(r.average_distance)},
      {"network_density", opt_json(r.network_density)},
      {"component_ratio", opt_json(r.component_ratio)},
      {"h_index", r.h_index},
      {"strong_components", r.strong_components},
      {"per_node", std::move(per_node)},
  };
  j["diameter"] = r.diameter ? nlohmann::json(*r.diameter) : nlohmann::json(nullptr);
  return j;
}

std::string metric_csv_header() {
  return "sample_id,nodes,edges,total_multiplicity,"
         "avg_in_degree_centrality,avg_out_degree_centrality,"
         "avg_weighted_in_degree_centrality,avg_weighted_out_degree_centrality,"
         "avg_normalized_in_degree_centrality,avg_normalized_out_degree_centrality,"
         "avg_normalized_weighted_in_degree_centrality,"
         "avg_normalized_weighted_out_degree_centrality,"
         "avg_normalized_betweenness_centrality,"
         "portion_in_degree_1,portion_out_degree_1,"
         "portion_weighted_in_degree_1,portion_weighted_out_degree_1,"
         "clustering_coefficient,average_distance,network_density,component_ratio,"
         "diameter,h_index,strong_components";
}

std::string to_csv_row(const MetricReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
  };
  std::string row = r.sample_id;
  row += ',' + std::to_string(r.node_count);
  row += ',' + std::to_string(r.edge_count);
  row += ',' + std::to_string(r.total_multiplicity);
  row += ',' + format_double(r.avg_in_degree_centrality);
  row += ',' + format_double(r.avg_out_degree_centrality);
  row += ',' + format_double(r.avg_weighted_in_degree_centrality);
  row += ',' + format_double(r.avg_weighted_out_degree_centrality);
  row += ',' + opt(r.avg_normalized_in_degree_centrality);
  row += ',' + opt(r.avg_normalized_out_degree_centrality);
  row += ',' + opt(r.avg_normalized_weighted_in_degree_centrality);
  row += ',' + opt(r.avg_normalized_weighted_out_degree_centrality);
  row += ',' + opt(r.avg_normalized_betweenness_centrality);
  row += ',' + format_double(r.portion_in_degree_1);
  row += ',' + format_double(r.portion_out_degree_1);
  row += ',' + format_double(r.portion_weighted_in_degree_1);
  row += ',' + format_double(r.portion_weighted_out_degree_1);
  row += ',' + format_double(r.clustering);
  row += ',' + opt(r.average_distance);
  row += ',' + opt(r.network_density);
  row += ',' + opt(r.component_ratio);
  row += ',' + (r.diameter ? std::to_string(*r.diameter) : std::string{});
  row += ',' + std::to_string(r.h_index);
  row += ',' + std::to_string(r.strong_components);
  return row;
}

}  // namespace sysgraph
