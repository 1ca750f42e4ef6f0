#ifndef SELFSTAB_GRAPH_HPP_
#define SELFSTAB_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace selfstab {

// Public node identifier, as it appears in edge lists and JSON documents.
using NodeId = std::uint64_t;

// Dense position of a node in ascending-id order. Because the mapping is
// monotone, comparing two vertices compares their identifiers, which is the
// order the guards use.
using Vertex = std::uint32_t;

// Position of a directed link (u, v) in lexicographic (u, v) order. Every
// ordered adjacent pair owns exactly one register slot.
using LinkIndex = std::uint32_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Immutable undirected simple graph in CSR layout. Neighbor lists are sorted,
// so the k-th neighbor slot of u is also the register r_{u, neighbors(u)[k]}.
class Graph {
 public:
  Graph() = default;

  // Nodes not mentioned in any edge may be listed in `nodes`; endpoints are
  // added automatically. Duplicate and reversed edges collapse.
  static Graph FromEdges(std::vector<NodeId> nodes,
                         std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t num_nodes() const { return ids_.size(); }
  std::size_t num_edges() const { return targets_.size() / 2; }
  std::size_t num_links() const { return targets_.size(); }

  NodeId id(Vertex v) const { return ids_[v]; }
  const std::vector<NodeId>& ids() const { return ids_; }
  // Throws GraphError for an unknown id.
  Vertex vertex_of(NodeId id) const;
  bool contains(NodeId id) const;

  std::span<const Vertex> neighbors(Vertex u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::size_t degree(Vertex u) const { return offsets_[u + 1] - offsets_[u]; }
  bool adjacent(Vertex u, Vertex v) const;

  // Register slot of r_{u,v}; throws GraphError if (u, v) is not an edge.
  LinkIndex link(Vertex u, Vertex v) const;
  LinkIndex first_link(Vertex u) const { return offsets_[u]; }
  Vertex link_source(LinkIndex e) const { return sources_[e]; }
  Vertex link_target(LinkIndex e) const { return targets_[e]; }
  // Slot of r_{v,u} for the slot of r_{u,v}.
  LinkIndex reverse_link(LinkIndex e) const { return reverse_[e]; }

  // Unordered edges as (smaller, larger) vertex pairs, lexicographic.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<NodeId> ids_;
  std::vector<LinkIndex> offsets_{0};
  std::vector<Vertex> targets_;
  std::vector<Vertex> sources_;
  std::vector<LinkIndex> reverse_;
};

std::size_t MaxDegree(const Graph& g);

// Edge-list text: one "u v" pair per line, '#' comments, blank lines ignored.
// A line holding a single id declares an isolated node.
Graph FromEdgeList(std::string_view text);
std::string ToEdgeList(const Graph& g);

enum class GraphFamily { kPath, kCycle, kComplete, kStar, kGnp };

struct GraphSpec {
  GraphFamily family = GraphFamily::kPath;
  std::size_t n = 2;
  double p = 0.0;           // gnp only
  std::uint64_t seed = 0;   // gnp only
  bool require_no_isolated = false;  // gnp only: resample until no isolated node

  static GraphSpec Path(std::size_t n) { return {GraphFamily::kPath, n}; }
  static GraphSpec Cycle(std::size_t n) { return {GraphFamily::kCycle, n}; }
  static GraphSpec Complete(std::size_t n) { return {GraphFamily::kComplete, n}; }
  static GraphSpec Star(std::size_t n) { return {GraphFamily::kStar, n}; }
  static GraphSpec Gnp(std::size_t n, double p, std::uint64_t seed) {
    return {GraphFamily::kGnp, n, p, seed};
  }
};

// Nodes are 0..n-1. Deterministic for a fixed spec.
Graph Generate(const GraphSpec& spec);

// "path:5", "cycle:10", "complete:4", "star:10", "gnp:20:0.3:7".
GraphSpec ParseGraphSpec(std::string_view text);
std::string FormatGraphSpec(const GraphSpec& spec);

}  // namespace selfstab

#endif  // SELFSTAB_GRAPH_HPP_
