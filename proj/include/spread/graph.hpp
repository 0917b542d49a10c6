#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "spread/errors.hpp"

namespace spread {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One undirected edge, canonicalized so that u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph over dense 0-based node ids.
/// Edges are sorted by (u, v), hold w > 0, and contain no duplicates or self-loops.
struct Graph {
  int n_nodes = 0;
  std::vector<Edge> edges;

  int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Graph plus optional ground truth used by the evaluation protocols.
struct LabeledGraph {
  Graph graph;
  std::optional<std::vector<int>> node_labels;  // one class id per node
  std::optional<std::vector<int>> edge_labels;  // 0/1 failure flag per edge, aligned to graph.edges
};

/// Per-node correspondence for two-copy constructions (i <-> map[i]).
using NodeMap = std::vector<int>;

namespace detail {

inline void canonicalize_edge(int& u, int& v) {
  if (u > v) std::swap(u, v);
}

}  // namespace detail

/// Sorts, canonicalizes and validates an edge list in place.
/// Throws ValidationError on self-loops, nonpositive weights, out-of-range ids,
/// or duplicate edges with conflicting weights. Equal-weight duplicates collapse.
inline Graph make_graph(int n_nodes, std::vector<Edge> edges) {
  if (n_nodes <= 0) throw ValidationError("graph: n_nodes must be positive");
  for (auto& e : edges) {
    detail::canonicalize_edge(e.u, e.v);
    if (e.u == e.v)
      throw ValidationError("graph: self-loop at node " + std::to_string(e.u));
    if (e.u < 0 || e.v >= n_nodes)
      throw ValidationError("graph: node id out of range [0, " + std::to_string(n_nodes) + ")");
    if (!(e.w > 0.0))
      throw ValidationError("graph: nonpositive weight on edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ")");
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  std::vector<Edge> dedup;
  dedup.reserve(edges.size());
  for (const auto& e : edges) {
    if (!dedup.empty() && dedup.back().u == e.u && dedup.back().v == e.v) {
      if (dedup.back().w != e.w)
        throw ValidationError("graph: duplicate edge (" + std::to_string(e.u) + "," +
                              std::to_string(e.v) + ") with conflicting weights");
      continue;
    }
    dedup.push_back(e);
  }
  return Graph{n_nodes, std::move(dedup)};
}

/// Index of an edge in g.edges by canonical endpoints, or -1.
inline int edge_index(const Graph& g, int u, int v) {
  detail::canonicalize_edge(u, v);
  auto it = std::lower_bound(g.edges.begin(), g.edges.end(), std::pair{u, v},
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::tie(e.u, e.v) < std::tie(key.first, key.second);
                             });
  if (it == g.edges.end() || it->u != u || it->v != v) return -1;
  return static_cast<int>(it - g.edges.begin());
}

/// Result of loading an edge-list file: graph, labels, and the original node
/// tokens (index = dense id) for the sidecar mapping.
struct LoadedGraph {
  LabeledGraph labeled;
  std::vector<std::string> node_tokens;
};

/// Parses the `u v [w] [fail]` edge-list format. `#` lines are comments.
/// Arbitrary node tokens are remapped to dense 0-based ids: numerically if all
/// tokens parse as nonnegative integers, lexicographically otherwise.
inline LoadedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_edge_list: cannot open '" + path + "'");

  struct Row {
    std::string u, v;
    double w;
    std::optional<int> fail;
  };
  std::vector<Row> rows;
  bool any_fail = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    while (!sv.empty() && (sv.back() == '\r' || sv.back() == '\n')) sv.remove_suffix(1);
    size_t start = sv.find_first_not_of(" \t");
    if (start == std::string_view::npos || sv[start] == '#') continue;

    std::istringstream ss{std::string(sv)};
    Row row;
    std::string wtok, ftok;
    ss >> row.u >> row.v;
    if (!ss)
      throw ValidationError("load_edge_list: row " + std::to_string(lineno) + ": expected 'u v [w] [fail]'");
    row.w = 1.0;
    if (ss >> wtok) {
      try {
        size_t pos = 0;
        row.w = std::stod(wtok, &pos);
        if (pos != wtok.size()) throw std::invalid_argument(wtok);
      } catch (const std::exception&) {
        throw ValidationError("load_edge_list: row " + std::to_string(lineno) + ": bad weight '" + wtok + "'");
      }
      if (ss >> ftok) {
        if (ftok != "0" && ftok != "1")
          throw ValidationError("load_edge_list: row " + std::to_string(lineno) + ": fail flag must be 0 or 1");
        row.fail = (ftok == "1");
        any_fail = true;
        std::string extra;
        if (ss >> extra)
          throw ValidationError("load_edge_list: row " + std::to_string(lineno) + ": trailing fields");
      }
    }
    if (row.u == row.v)
      throw ValidationError("load_edge_list: row " + std::to_string(lineno) + ": self-loop '" + row.u + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("load_edge_list: '" + path + "' has no edges");

  // Dense id assignment.
  std::vector<std::string> tokens;
  tokens.reserve(rows.size() * 2);
  for (const auto& r : rows) {
    tokens.push_back(r.u);
    tokens.push_back(r.v);
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  bool all_numeric = true;
  std::vector<std::pair<std::int64_t, std::string>> numeric;
  numeric.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec == std::errc::result_out_of_range)
      throw ValidationError("load_edge_list: node id overflow '" + t + "'");
    if (ec != std::errc() || ptr != t.data() + t.size() || value < 0) {
      all_numeric = false;
      break;
    }
    numeric.emplace_back(value, t);
  }
  if (all_numeric) {
    std::sort(numeric.begin(), numeric.end());
    tokens.clear();
    for (auto& [value, t] : numeric) tokens.push_back(std::move(t));
  }
  std::unordered_map<std::string, int> id_of;
  id_of.reserve(tokens.size());
  for (int i = 0; i < static_cast<int>(tokens.size()); ++i) id_of[tokens[i]] = i;

  std::vector<Edge> edges;
  edges.reserve(rows.size());
  std::map<std::pair<int, int>, int> fail_of;  // canonical edge -> flag
  for (const auto& r : rows) {
    int u = id_of.at(r.u), v = id_of.at(r.v);
    detail::canonicalize_edge(u, v);
    edges.push_back(Edge{u, v, r.w});
    if (any_fail) {
      int f = r.fail.value_or(0);
      auto [it, inserted] = fail_of.try_emplace({u, v}, f);
      if (!inserted && it->second != f)
        throw ValidationError("load_edge_list: duplicate edge (" + r.u + "," + r.v +
                              ") with conflicting fail flags");
    }
  }
  Graph g = make_graph(static_cast<int>(tokens.size()), std::move(edges));

  LabeledGraph lg{std::move(g), std::nullopt, std::nullopt};
  if (any_fail) {
    std::vector<int> flags;
    flags.reserve(lg.graph.edges.size());
    for (const auto& e : lg.graph.edges) flags.push_back(fail_of.at({e.u, e.v}));
    lg.edge_labels = std::move(flags);
  }
  return LoadedGraph{std::move(lg), std::move(tokens)};
}

namespace detail {

// Shortest text round-tripping to the same double (17 significant digits max).
inline std::string format_weight(double w) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, w);
    if (std::stod(buf) == w) return buf;
  }
  return buf;
}

}  // namespace detail

/// Writes the canonical `u v w [fail]` format, LF line endings.
inline void save_edge_list(const std::string& path, const Graph& g,
                           const std::optional<std::vector<int>>& edge_labels = std::nullopt) {
  if (edge_labels && edge_labels->size() != g.edges.size())
    throw ValidationError("save_edge_list: edge label count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("save_edge_list: cannot open '" + path + "'");
  out << "# " << g.n_nodes << " nodes, " << g.edges.size() << " edges\n";
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    out << e.u << ' ' << e.v << ' ' << detail::format_weight(e.w);
    if (edge_labels) out << ' ' << (*edge_labels)[i];
    out << '\n';
  }
  if (!out) throw ValidationError("save_edge_list: write failed for '" + path + "'");
}

/// One integer class label per line, aligned to dense node ids.
inline std::vector<int> load_node_labels(const std::string& path, int n_nodes) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_node_labels: cannot open '" + path + "'");
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    labels.push_back(std::stoi(line));
  }
  if (static_cast<int>(labels.size()) != n_nodes)
    throw ValidationError("load_node_labels: got " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(n_nodes) + " nodes");
  return labels;
}

/// Weighted adjacency matrix W.
inline Matrix build_adjacency(const Graph& g) {
  Matrix w = Matrix::Zero(g.n_nodes, g.n_nodes);
  for (const auto& e : g.edges) {
    w(e.u, e.v) = e.w;
    w(e.v, e.u) = e.w;
  }
  return w;
}

/// Combinatorial Laplacian L = D - W of an arbitrary affinity matrix.
inline Matrix laplacian_of(const Matrix& w) {
  Matrix l = -w;
  for (Eigen::Index i = 0; i < w.rows(); ++i) l(i, i) = w.row(i).sum() - w(i, i);
  return l;
}

/// Combinatorial Laplacian L = D - W of a graph.
inline Matrix build_laplacian(const Graph& g) { return laplacian_of(build_adjacency(g)); }

/// Two cliques K_m1 joined by a path of m2 nodes.
/// Nodes: first clique 0..m1-1, handle m1..m1+m2-1, second clique m1+m2..2*m1+m2-1.
/// Node m1-1 attaches to the handle start, node m1+m2 to the handle end.
inline Graph generate_barbell(int m1, int m2) {
  if (m1 < 3) throw ValidationError("generate_barbell: m1 must be >= 3");
  if (m2 < 1) throw ValidationError("generate_barbell: m2 must be >= 1");
  std::vector<Edge> edges;
  auto clique = [&edges](int lo, int hi) {
    for (int i = lo; i < hi; ++i)
      for (int j = i + 1; j < hi; ++j) edges.push_back(Edge{i, j, 1.0});
  };
  clique(0, m1);
  clique(m1 + m2, 2 * m1 + m2);
  for (int i = m1 - 1; i < m1 + m2; ++i) edges.push_back(Edge{i, i + 1, 1.0});
  return make_graph(2 * m1 + m2, std::move(edges));
}

/// Two copies of g (ids i and i+N) with n_mirror_edges distinct nodes, chosen
/// uniformly by the seeded RNG, each joined to its mirror by a unit edge.
/// Returns the graph and the correspondence map i <-> i+N.
inline std::pair<Graph, NodeMap> generate_mirrored(const Graph& g, int n_mirror_edges,
                                                   std::uint64_t rng_seed) {
  const int n = g.n_nodes;
  if (n_mirror_edges < 1 || n_mirror_edges > n)
    throw ValidationError("generate_mirrored: n_mirror_edges must be in [1, n_nodes]");
  std::vector<Edge> edges;
  edges.reserve(g.edges.size() * 2 + n_mirror_edges);
  for (const auto& e : g.edges) {
    edges.push_back(e);
    edges.push_back(Edge{e.u + n, e.v + n, e.w});
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < n_mirror_edges; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
    edges.push_back(Edge{pool[i], pool[i] + n, 1.0});
  }
  NodeMap correspondence(2 * n);
  for (int i = 0; i < n; ++i) {
    correspondence[i] = i + n;
    correspondence[i + n] = i;
  }
  return {make_graph(2 * n, std::move(edges)), std::move(correspondence)};
}

/// BFS-reachability equivalence classes, each sorted ascending.
inline std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::vector<std::vector<int>> adj(g.n_nodes);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> comp(g.n_nodes, -1);
  std::vector<std::vector<int>> components;
  for (int s = 0; s < g.n_nodes; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(components.size());
    components.emplace_back();
    std::queue<int> q;
    q.push(s);
    comp[s] = id;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      components[id].push_back(u);
      for (int v : adj[u])
        if (comp[v] < 0) {
          comp[v] = id;
          q.push(v);
        }
    }
    std::sort(components[id].begin(), components[id].end());
  }
  return components;
}

inline bool is_connected(const Graph& g) { return connected_components(g).size() == 1; }

/// FNV-1a over the canonical edge list; keys embedding provenance metadata.
inline std::uint64_t graph_hash(const Graph& g) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(&g.n_nodes, sizeof(g.n_nodes));
  for (const auto& e : g.edges) {
    mix(&e.u, sizeof(e.u));
    mix(&e.v, sizeof(e.v));
    mix(&e.w, sizeof(e.w));
  }
  return h;
}

}  // namespace spread
