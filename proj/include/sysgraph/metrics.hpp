#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sysgraph/graph.hpp"

namespace sysgraph {

enum class Direction { in, out };

// Degree conventions: a self-loop adds 1 to its node's in-degree and 1 to its
// out-degree, so sum(in) == sum(out) == number of distinct edges always holds.
// Weighted degrees sum edge multiplicities instead of counting edges.
std::vector<std::uint64_t> degrees(const SystemCallGraph& g, Direction dir, bool weighted);

struct DegreeHistogram {
  Direction direction = Direction::in;
  bool weighted = false;
  std::size_t node_count = 0;
  std::map<std::uint64_t, std::size_t> counts;  // degree k -> number of nodes

  // Empirical probability p(k) = n_k / n.
  double p(std::uint64_t k) const;
};

DegreeHistogram degree_distribution(const SystemCallGraph& g, Direction dir, bool weighted);

// Mean node degree; with normalized=true each degree is divided by the
// maximum first (DegenerateNormalizationError when the maximum is 0).
double avg_degree_centrality(const SystemCallGraph& g, Direction dir, bool weighted,
                             bool normalized = false);

// Fraction of nodes whose degree is exactly 1.
double portion_degree_one(const SystemCallGraph& g, Direction dir, bool weighted);

// Shortest-path betweenness over directed unit-length edges: for each node i,
// the sum over ordered pairs (s, t), s != t != i, of the fraction of s->t
// geodesics passing through i. Self-loops are ignored; no normalization.
std::vector<double> betweenness(const SystemCallGraph& g);

// Global transitivity of the undirected simple projection (loops dropped):
// 3 * triangles / connected triples; 0 when the projection has no triples.
double clustering_coefficient(const SystemCallGraph& g);

// Mean directed geodesic length over ordered pairs i != j, unreachable pairs
// excluded. Throws NoFinitePairsError when no pair is reachable.
double average_distance(const SystemCallGraph& g);

// 2m / (n (n-1)) with m = distinct non-loop directed edges. Applied verbatim,
// so values above 1 are possible for dense directed graphs (a 2-cycle gives
// 2.0). Throws TooSmallError when n < 2.
double network_density(const SystemCallGraph& g);

// (c - 1) / (n - 1) where c counts weakly connected components.
// Throws TooSmallError when n < 2.
double component_ratio(const SystemCallGraph& g);

struct GraphExtras {
  std::size_t diameter = 0;            // longest finite directed geodesic
  std::size_t h_index = 0;             // largest h with >= h nodes of total degree >= h
  std::size_t strong_components = 0;
};

// Throws NoFinitePairsError when no finite pair exists for the diameter.
GraphExtras extras(const SystemCallGraph& g);

struct NodeMetrics {
  std::uint64_t in_degree = 0;
  std::uint64_t out_degree = 0;
  std::uint64_t weighted_in_degree = 0;
  std::uint64_t weighted_out_degree = 0;
  double betweenness = 0.0;
};

// Everything computed for one graph. Metrics that are undefined for the given
// graph (normalization by zero, unreachable pairs, n < 2) come back empty
// instead of raising, so one report covers any non-empty graph.
struct MetricReport {
  std::string sample_id;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::uint64_t total_multiplicity = 0;

  std::vector<std::string> node_names;
  std::vector<NodeMetrics> per_node;

  double avg_in_degree_centrality = 0.0;
  double avg_out_degree_centrality = 0.0;
  double avg_weighted_in_degree_centrality = 0.0;
  double avg_weighted_out_degree_centrality = 0.0;
  std::optional<double> avg_normalized_in_degree_centrality;
  std::optional<double> avg_normalized_out_degree_centrality;
  std::optional<double> avg_normalized_weighted_in_degree_centrality;
  std::optional<double> avg_normalized_weighted_out_degree_centrality;
  std::optional<double> avg_normalized_betweenness_centrality;

  double portion_in_degree_1 = 0.0;
  double portion_out_degree_1 = 0.0;
  double portion_weighted_in_degree_1 = 0.0;
  double portion_weighted_out_degree_1 = 0.0;

  double clustering = 0.0;
  std::optional<double> average_distance;
  std::optional<double> network_density;
  std::optional<double> component_ratio;
  std::optional<std::size_t> diameter;
  std::size_t h_index = 0;
  std::size_t strong_components = 0;
};

// Throws EmptyGraphError for a graph with no nodes.
MetricReport compute_metrics(const SystemCallGraph& g, std::string sample_id = {});

nlohmann::json to_json(const MetricReport& report);
std::string metric_csv_header();
std::string to_csv_row(const MetricReport& report);

}  // namespace sysgraph
