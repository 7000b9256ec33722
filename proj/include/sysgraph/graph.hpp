#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sysgraph/dictionary.hpp"
#include "sysgraph/trace.hpp"

namespace sysgraph {

// Directed graph over system call names. Parallel edges collapse into a
// multiplicity count; self-loops are kept. Node ids are dense indices in
// first-appearance order.
class SystemCallGraph {
 public:
  struct Node {
    std::string name;
    bool in_dictionary = false;
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::uint64_t multiplicity = 1;
  };

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }  // distinct pairs
  std::uint64_t total_multiplicity() const { return total_multiplicity_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::optional<std::size_t> find_node(std::string_view name) const;

  // Sorted by (from, to); node ids ascend in insertion order.
  const std::vector<Edge>& edges() const { return edges_; }
  std::uint64_t multiplicity(std::size_t from, std::size_t to) const;

  // Distinct successors/predecessors, self included for loops, ascending ids.
  const std::vector<std::vector<std::size_t>>& out_adjacency() const { return out_; }
  const std::vector<std::vector<std::size_t>>& in_adjacency() const { return in_; }

  // Structural equality keyed on names, dictionary flags and multiplicities;
  // insertion order does not matter.
  bool operator==(const SystemCallGraph& other) const;

 private:
  friend class GraphBuilder;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> edge_index_;
  std::vector<std::vector<std::size_t>> out_, in_;
  std::uint64_t total_multiplicity_ = 0;
};

class GraphBuilder {
 public:
  // Idempotent per name; the dictionary flag sticks once set true.
  std::size_t add_node(std::string_view name, bool in_dictionary);
  // Creates missing endpoints (flag false) and accumulates multiplicity.
  void add_edge(std::string_view from, std::string_view to, std::uint64_t multiplicity = 1);

  bool empty() const { return graph_.nodes_.empty(); }
  SystemCallGraph build();

 private:
  SystemCallGraph graph_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> pending_;
};

// Consecutive call pairs where at least one side is in the dictionary.
std::vector<std::pair<std::string, std::string>> refine_sequence(
    const CallSequence& seq, const SyscallDictionary& dict);

// Builds the dictionary-filtered call graph of a trace. Throws EmptyGraphError
// when no consecutive pair touches the dictionary.
SystemCallGraph build_graph(const CallSequence& seq, const SyscallDictionary& dict);

enum class GraphFormat { edge_list, dot, gexf };
GraphFormat graph_format_from_string(std::string_view name);
std::string_view to_string(GraphFormat format);

std::string export_graph(const SystemCallGraph& g, GraphFormat format);

// Inverse of export_graph for edge_list and gexf (dot is export-only and
// raises ParseError). The edge-list format does not carry dictionary flags,
// so membership is re-derived from `dict` when given, false otherwise.
SystemCallGraph import_graph(std::string_view data, GraphFormat format,
                             const SyscallDictionary* dict = nullptr);

}  // namespace sysgraph
