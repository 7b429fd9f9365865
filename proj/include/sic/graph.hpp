#pragma once

// Directed weighted graph model, cycle representation, edge-list I/O and
// hop-count BFS.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sic {

using NodeId = std::uint32_t;

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

struct Edge {
  NodeId src{0};
  NodeId dst{0};
  double weight{0.0};

  friend bool operator==(const Edge&, const Edge&) = default;
};

/************ errors ************************************************/

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NegativeWeight : public ParseError {
 public:
  explicit NegativeWeight(std::size_t line) : ParseError(line, "negative edge weight") {}
};

class DuplicateEdge : public ParseError {
 public:
  explicit DuplicateEdge(std::size_t line) : ParseError(line, "duplicate edge") {}
};

class InvalidCycle : public GraphError {
 public:
  using GraphError::GraphError;
};

/************ DiGraph ***********************************************/

/// Simple directed graph with non-negative edge weights.
///
/// Immutable after construction. Edges keep the order they were given in;
/// adjacency lists are sorted by neighbor id and refer back to edge indices.
class DiGraph {
 public:
  struct Arc {
    NodeId node;       // neighbor
    std::size_t edge;  // index into edges()
  };

  DiGraph() = default;

  /// Throws GraphError on out-of-range ids, negative or non-finite weights,
  /// and duplicate (src, dst) pairs.
  DiGraph(std::size_t node_count, std::vector<Edge> edges)
      : n_(node_count), edges_(std::move(edges)) {
    for (const Edge& e : edges_) {
      if (e.src >= n_ || e.dst >= n_) {
        throw GraphError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                         ") references a node outside [0," + std::to_string(n_) + ")");
      }
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
        throw GraphError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                         ") has a negative or non-finite weight");
      }
    }
    build_index(out_begin_, out_, [](const Edge& e) { return e.src; },
                [](const Edge& e) { return e.dst; });
    build_index(in_begin_, in_, [](const Edge& e) { return e.dst; },
                [](const Edge& e) { return e.src; });
    for (NodeId u = 0; u < n_; ++u) {
      auto arcs = out_arcs(u);
      for (std::size_t i = 1; i < arcs.size(); ++i) {
        if (arcs[i].node == arcs[i - 1].node) {
          throw GraphError("duplicate edge (" + std::to_string(u) + "," +
                           std::to_string(arcs[i].node) + ")");
        }
      }
    }
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t idx) const { return edges_[idx]; }

  std::span<const Arc> out_arcs(NodeId u) const {
    return {out_.data() + out_begin_[u], out_.data() + out_begin_[u + 1]};
  }
  std::span<const Arc> in_arcs(NodeId v) const {
    return {in_.data() + in_begin_[v], in_.data() + in_begin_[v + 1]};
  }

  std::optional<std::size_t> edge_index(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_) return std::nullopt;
    auto arcs = out_arcs(u);
    auto it = std::lower_bound(arcs.begin(), arcs.end(), v,
                               [](const Arc& a, NodeId x) { return a.node < x; });
    if (it == arcs.end() || it->node != v) return std::nullopt;
    return it->edge;
  }

  bool has_edge(NodeId u, NodeId v) const { return edge_index(u, v).has_value(); }

  std::optional<double> weight(NodeId u, NodeId v) const {
    if (auto idx = edge_index(u, v)) return edges_[*idx].weight;
    return std::nullopt;
  }

  double out_strength(NodeId u) const {
    double s = 0.0;
    for (const Arc& a : out_arcs(u)) s += edges_[a.edge].weight;
    return s;
  }
  double in_strength(NodeId v) const {
    double s = 0.0;
    for (const Arc& a : in_arcs(v)) s += edges_[a.edge].weight;
    return s;
  }

  /// Same topology and edge order, new weights (one per edge).
  DiGraph with_weights(std::span<const double> weights) const {
    if (weights.size() != edges_.size()) {
      throw GraphError("with_weights: expected " + std::to_string(edges_.size()) + " weights");
    }
    std::vector<Edge> es = edges_;
    for (std::size_t i = 0; i < es.size(); ++i) es[i].weight = weights[i];
    return DiGraph(n_, std::move(es));
  }

  DiGraph transpose() const {
    std::vector<Edge> es;
    es.reserve(edges_.size());
    for (const Edge& e : edges_) es.push_back({e.dst, e.src, e.weight});
    return DiGraph(n_, std::move(es));
  }

  /// Induced subgraph on the nodes with keep[v] == true. Returns the
  /// subgraph and the map from new ids to original ids.
  std::pair<DiGraph, std::vector<NodeId>> induced_subgraph(const std::vector<bool>& keep) const {
    std::vector<NodeId> kept;
    std::vector<NodeId> remap(n_, std::numeric_limits<NodeId>::max());
    for (NodeId v = 0; v < n_; ++v) {
      if (keep[v]) {
        remap[v] = static_cast<NodeId>(kept.size());
        kept.push_back(v);
      }
    }
    std::vector<Edge> es;
    for (const Edge& e : edges_) {
      if (keep[e.src] && keep[e.dst]) es.push_back({remap[e.src], remap[e.dst], e.weight});
    }
    return {DiGraph(kept.size(), std::move(es)), std::move(kept)};
  }

 private:
  template <typename From, typename To>
  void build_index(std::vector<std::size_t>& begin, std::vector<Arc>& arcs, From from, To to) {
    begin.assign(n_ + 1, 0);
    for (const Edge& e : edges_) ++begin[from(e) + 1];
    for (std::size_t i = 0; i < n_; ++i) begin[i + 1] += begin[i];
    arcs.resize(edges_.size());
    std::vector<std::size_t> fill(begin.begin(), begin.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      arcs[fill[from(edges_[i])]++] = Arc{to(edges_[i]), i};
    }
    for (std::size_t u = 0; u < n_; ++u) {
      std::sort(arcs.begin() + static_cast<std::ptrdiff_t>(begin[u]),
                arcs.begin() + static_cast<std::ptrdiff_t>(begin[u + 1]),
                [](const Arc& a, const Arc& b) { return a.node < b.node; });
    }
  }

  std::size_t n_{0};
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_begin_{0};
  std::vector<Arc> out_;
  std::vector<std::size_t> in_begin_{0};
  std::vector<Arc> in_;
};

/************ Cycle *************************************************/

/// Node sequence v1..vk of a directed cycle; the closing edge (vk, v1) is
/// implied. An empty sequence is the empty pattern.
struct Cycle {
  std::vector<NodeId> nodes;

  std::size_t length() const noexcept { return nodes.size(); }
  bool empty() const noexcept { return nodes.empty(); }

  /// i-th edge (nodes[i], nodes[i+1 mod k]).
  std::pair<NodeId, NodeId> edge_at(std::size_t i) const {
    return {nodes[i], nodes[(i + 1) % nodes.size()]};
  }

  bool contains(NodeId v) const { return std::find(nodes.begin(), nodes.end(), v) != nodes.end(); }

  /// Rotation starting at the smallest node id.
  Cycle canonical() const {
    Cycle c = *this;
    if (!c.nodes.empty()) {
      auto it = std::min_element(c.nodes.begin(), c.nodes.end());
      std::rotate(c.nodes.begin(), it, c.nodes.end());
    }
    return c;
  }

  friend bool operator==(const Cycle&, const Cycle&) = default;
  friend auto operator<=>(const Cycle& a, const Cycle& b) { return a.nodes <=> b.nodes; }
};

/// True iff `nodes` is a non-empty simple directed cycle of `graph`.
inline bool validate_cycle(const DiGraph& graph, std::span<const NodeId> nodes) {
  if (nodes.empty() || nodes.size() > graph.node_count()) return false;
  std::vector<bool> seen(graph.node_count(), false);
  for (NodeId v : nodes) {
    if (v >= graph.node_count() || seen[v]) return false;
    seen[v] = true;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!graph.has_edge(nodes[i], nodes[(i + 1) % nodes.size()])) return false;
  }
  return true;
}

inline bool validate_cycle(const DiGraph& graph, const Cycle& cycle) {
  return validate_cycle(graph, std::span<const NodeId>(cycle.nodes));
}

/************ BFS ***************************************************/

/// Unweighted hop distances from `source` (or to `source` when reversed).
/// Unreachable nodes get kUnreachable.
inline std::vector<std::size_t> bfs_hops(const DiGraph& graph, NodeId source, bool reversed = false) {
  std::vector<std::size_t> dist(graph.node_count(), kUnreachable);
  if (source >= graph.node_count()) throw GraphError("bfs_hops: source out of range");
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    auto arcs = reversed ? graph.in_arcs(u) : graph.out_arcs(u);
    for (const auto& a : arcs) {
      if (dist[a.node] == kUnreachable) {
        dist[a.node] = dist[u] + 1;
        frontier.push(a.node);
      }
    }
  }
  return dist;
}

/************ edge-list I/O *****************************************/

struct LoadOptions {
  // Assign ids by first appearance and keep the tokens as labels, instead
  // of reading ids as integers.
  bool relabel{false};
  bool allow_self_loops{true};
};

struct LoadedGraph {
  DiGraph graph;
  std::vector<std::string> labels;  // empty unless relabel or a label file was read
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline bool parse_uint(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    if (s[0] == '-' || s[0] == '+') return false;
    out = std::stoull(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

inline bool parse_double(const std::string& s, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses `src dst weight` lines (tab or space separated, `#` comments).
inline LoadedGraph parse_edge_list(std::istream& in, const LoadOptions& opts = {}) {
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_line;
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::size_t max_id_plus_one = 0;

  auto node_of = [&](const std::string& tok, std::size_t line_no) -> NodeId {
    if (opts.relabel) {
      auto [it, inserted] = ids.try_emplace(tok, static_cast<NodeId>(labels.size()));
      if (inserted) labels.push_back(tok);
      return it->second;
    }
    std::uint64_t v = 0;
    if (!detail::parse_uint(tok, v) || v >= std::numeric_limits<NodeId>::max()) {
      throw ParseError(line_no, "invalid node id '" + tok + "'");
    }
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, v + 1);
    return static_cast<NodeId>(v);
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 3) throw ParseError(line_no, "expected 'src dst weight'");
    double w = 0.0;
    if (!detail::parse_double(toks[2], w)) throw ParseError(line_no, "invalid weight '" + toks[2] + "'");
    if (w < 0.0) throw NegativeWeight(line_no);
    NodeId s = node_of(toks[0], line_no);
    NodeId d = node_of(toks[1], line_no);
    if (s == d && !opts.allow_self_loops) throw ParseError(line_no, "self-loop not allowed");
    edges.push_back({s, d, w});
    edge_line.push_back(line_no);
  }

  // Duplicate detection with the offending line number.
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (edges[a].src != edges[b].src) return edges[a].src < edges[b].src;
    if (edges[a].dst != edges[b].dst) return edges[a].dst < edges[b].dst;
    return a < b;
  });
  std::optional<std::size_t> dup_line;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Edge& a = edges[order[i - 1]];
    const Edge& b = edges[order[i]];
    if (a.src == b.src && a.dst == b.dst) {
      std::size_t l = edge_line[order[i]];
      dup_line = dup_line ? std::min(*dup_line, l) : l;
    }
  }
  if (dup_line) throw DuplicateEdge(*dup_line);

  std::size_t n = opts.relabel ? labels.size() : max_id_plus_one;
  return {DiGraph(n, std::move(edges)), std::move(labels)};
}

inline LoadedGraph load_edge_list(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path + "'");
  return parse_edge_list(in, opts);
}

inline void write_edge_list(std::ostream& out, const DiGraph& graph,
                            std::span<const std::string> labels = {}) {
  auto name = [&](NodeId v) { return labels.empty() ? std::to_string(v) : labels[v]; };
  std::ostringstream w;
  w.precision(17);
  for (const Edge& e : graph.edges()) {
    w.str({});
    w << e.weight;
    out << name(e.src) << '\t' << name(e.dst) << '\t' << w.str() << '\n';
  }
}

/// Reads `id<TAB>label` lines into a label vector of size `node_count`.
/// Unlisted ids keep their decimal id as label.
inline std::vector<std::string> load_labels(const std::string& path, std::size_t node_count) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open label file '" + path + "'");
  std::vector<std::string> labels(node_count);
  for (std::size_t v = 0; v < node_count; ++v) labels[v] = std::to_string(v);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "expected 'id<TAB>label'");
    std::uint64_t id = 0;
    if (!detail::parse_uint(std::string(detail::trim(line.substr(0, tab))), id) || id >= node_count) {
      throw ParseError(line_no, "invalid node id in label file");
    }
    labels[id] = std::string(detail::trim(line.substr(tab + 1)));
  }
  return labels;
}

}  // namespace sic
