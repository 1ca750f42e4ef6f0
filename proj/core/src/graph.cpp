#include "selfstab/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <random>
#include <sstream>

namespace selfstab {

Graph Graph::FromEdges(std::vector<NodeId> nodes,
                       std::vector<std::pair<NodeId, NodeId>> edges) {
  for (const auto& [u, v] : edges) {
    if (u == v) {
      throw GraphError("self-loop on node " + std::to_string(u));
    }
    nodes.push_back(u);
    nodes.push_back(v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() > std::numeric_limits<Vertex>::max()) {
    throw GraphError("too many nodes");
  }

  Graph g;
  g.ids_ = std::move(nodes);

  std::vector<std::pair<Vertex, Vertex>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    Vertex a = g.vertex_of(u);
    Vertex b = g.vertex_of(v);
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  const std::size_t n = g.ids_.size();
  g.offsets_.assign(n + 1, 0);
  for (const auto& arc : arcs) ++g.offsets_[arc.first + 1];
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.reserve(arcs.size());
  g.sources_.reserve(arcs.size());
  for (const auto& [a, b] : arcs) {
    g.sources_.push_back(a);
    g.targets_.push_back(b);
  }
  g.reverse_.resize(arcs.size());
  for (LinkIndex e = 0; e < arcs.size(); ++e) {
    g.reverse_[e] = g.link(g.targets_[e], g.sources_[e]);
  }
  return g;
}

Vertex Graph::vertex_of(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw GraphError("unknown node " + std::to_string(id));
  }
  return static_cast<Vertex>(it - ids_.begin());
}

bool Graph::contains(NodeId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

LinkIndex Graph::link(Vertex u, Vertex v) const {
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) {
    throw GraphError("no edge " + std::to_string(id(u)) + "-" +
                     std::to_string(id(v)));
  }
  return offsets_[u] + static_cast<LinkIndex>(it - nbrs.begin());
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(num_edges());
  for (LinkIndex e = 0; e < targets_.size(); ++e) {
    if (sources_[e] < targets_[e]) out.emplace_back(sources_[e], targets_[e]);
  }
  return out;
}

std::size_t MaxDegree(const Graph& g) {
  std::size_t best = 0;
  for (Vertex u = 0; u < g.num_nodes(); ++u) best = std::max(best, g.degree(u));
  return best;
}

namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

NodeId ParseId(std::string_view token, std::size_t line_no) {
  NodeId value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected a nonnegative integer, got '" +
                                  std::string(token) + "'");
  }
  return value;
}

}  // namespace

Graph FromEdgeList(std::string_view text) {
  std::vector<NodeId> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() == 1) {
      nodes.push_back(ParseId(tokens[0], line_no));
    } else if (tokens.size() == 2) {
      NodeId u = ParseId(tokens[0], line_no);
      NodeId v = ParseId(tokens[1], line_no);
      if (u == v) throw ParseError(line_no, "self-loop on node " + std::to_string(u));
      edges.emplace_back(u, v);
    } else {
      throw ParseError(line_no, "expected 'u v'");
    }
  }
  return Graph::FromEdges(std::move(nodes), std::move(edges));
}

std::string ToEdgeList(const Graph& g) {
  std::ostringstream out;
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    if (g.degree(u) == 0) out << g.id(u) << '\n';
  }
  for (const auto& [u, v] : g.edges()) out << g.id(u) << ' ' << g.id(v) << '\n';
  return out.str();
}

namespace {

std::vector<NodeId> Iota(std::size_t n) {
  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

std::vector<std::pair<NodeId, NodeId>> GnpEdges(std::size_t n, double p,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return edges;
}

constexpr int kMaxGnpAttempts = 1000;

}  // namespace

Graph Generate(const GraphSpec& spec) {
  const std::size_t n = spec.n;
  std::vector<std::pair<NodeId, NodeId>> edges;
  switch (spec.family) {
    case GraphFamily::kPath:
      if (n < 2) throw GraphError("path needs n >= 2");
      for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
      break;
    case GraphFamily::kCycle:
      if (n < 3) throw GraphError("cycle needs n >= 3");
      for (NodeId u = 0; u < n; ++u) edges.emplace_back(u, (u + 1) % n);
      break;
    case GraphFamily::kComplete:
      if (n < 2) throw GraphError("complete graph needs n >= 2");
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      break;
    case GraphFamily::kStar:
      if (n < 2) throw GraphError("star needs n >= 2");
      for (NodeId v = 1; v < n; ++v) edges.emplace_back(0, v);
      break;
    case GraphFamily::kGnp: {
      if (n < 2) throw GraphError("gnp needs n >= 2");
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw GraphError("gnp needs 0 <= p <= 1");
      if (!spec.require_no_isolated) {
        edges = GnpEdges(n, spec.p, spec.seed);
        break;
      }
      for (int attempt = 0; attempt < kMaxGnpAttempts; ++attempt) {
        edges = GnpEdges(n, spec.p, spec.seed + attempt);
        Graph g = Graph::FromEdges(Iota(n), edges);
        bool isolated = false;
        for (Vertex u = 0; u < n; ++u) isolated = isolated || g.degree(u) == 0;
        if (!isolated) return g;
      }
      throw GraphError("gnp: no sample without isolated nodes after " +
                       std::to_string(kMaxGnpAttempts) + " attempts");
    }
  }
  return Graph::FromEdges(Iota(n), std::move(edges));
}

GraphSpec ParseGraphSpec(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    parts.emplace_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  auto bad = [&]() { return GraphError("bad graph spec '" + std::string(text) + "'"); };
  auto to_size = [&](const std::string& s) -> std::uint64_t {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw bad();
    return v;
  };

  GraphSpec spec;
  const std::string& family = parts[0];
  if (family == "gnp") {
    if (parts.size() != 4) throw bad();
    spec.family = GraphFamily::kGnp;
    spec.n = to_size(parts[1]);
    try {
      spec.p = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw bad();
    }
    spec.seed = to_size(parts[3]);
    return spec;
  }
  if (parts.size() != 2) throw bad();
  spec.n = to_size(parts[1]);
  if (family == "path") {
    spec.family = GraphFamily::kPath;
  } else if (family == "cycle") {
    spec.family = GraphFamily::kCycle;
  } else if (family == "complete") {
    spec.family = GraphFamily::kComplete;
  } else if (family == "star") {
    spec.family = GraphFamily::kStar;
  } else {
    throw bad();
  }
  return spec;
}

std::string FormatGraphSpec(const GraphSpec& spec) {
  std::ostringstream out;
  switch (spec.family) {
    case GraphFamily::kPath: out << "path:" << spec.n; break;
    case GraphFamily::kCycle: out << "cycle:" << spec.n; break;
    case GraphFamily::kComplete: out << "complete:" << spec.n; break;
    case GraphFamily::kStar: out << "star:" << spec.n; break;
    case GraphFamily::kGnp:
      out << "gnp:" << spec.n << ':' << spec.p << ':' << spec.seed;
      break;
  }
  return out.str();
}

}  // namespace selfstab
