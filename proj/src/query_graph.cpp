#include "dsm/query_graph.hpp"

#include <algorithm>
#include <queue>

#include "dsm/error.hpp"

namespace dsm {

QueryGraph::QueryGraph(std::vector<Label> labels,
                       std::span<const std::pair<QueryVertex, QueryVertex>> edges)
    : labels_(std::move(labels)), adj_(labels_.size()) {
  const auto n = labels_.size();
  if (n == 0) throw Error(ErrorKind::InvalidParams, "query graph has no vertices");
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw Error(ErrorKind::UndeclaredVertex, "query edge endpoint out of range");
    if (a == b) throw Error(ErrorKind::SelfLoop, "query vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw Error(ErrorKind::DuplicateEdge, "query graph has a repeated edge");
  for (auto [a, b] : edges_) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());

  if (n > 1) {
    std::vector<bool> seen(n, false);
    std::queue<QueryVertex> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      auto q = frontier.front();
      frontier.pop();
      for (auto w : adj_[q])
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          frontier.push(w);
        }
    }
    if (reached != n) throw Error(ErrorKind::InvalidParams, "query graph is not connected");
  } else {
    throw Error(ErrorKind::InvalidParams, "query graph needs at least one edge");
  }
}

QueryGraph QueryGraph::from_graph(const DynamicGraph& g) {
  const auto n = g.vertex_count();
  if (g.id_bound() != n)
    throw Error(ErrorKind::InvalidParams, "query vertex ids must be exactly 0..n-1");
  std::vector<Label> labels(n);
  for (VertexId v = 0; v < n; ++v) labels[v] = g.label(v);
  std::vector<std::pair<QueryVertex, QueryVertex>> edges;
  for (auto [u, v] : g.edges()) edges.emplace_back(u, v);
  return QueryGraph(std::move(labels), edges);
}

DynamicGraph QueryGraph::to_graph() const {
  DynamicGraph g;
  for (QueryVertex q = 0; q < size(); ++q) g.add_vertex(q, labels_[q]);
  for (auto [a, b] : edges_) g.add_edge(a, b);
  return g;
}

bool QueryGraph::has_edge(QueryVertex a, QueryVertex b) const {
  const auto& n = adj_[a];
  return std::binary_search(n.begin(), n.end(), b);
}

std::string format_mapping(const Mapping& m) {
  std::string out = "match";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += " q";
    out += std::to_string(i);
    out += "->";
    out += std::to_string(m[i]);
  }
  return out;
}

bool is_valid_mapping(const DynamicGraph& g, const QueryGraph& q, const Mapping& m) {
  if (m.size() != q.size()) return false;
  std::vector<VertexId> sorted(m);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (QueryVertex i = 0; i < q.size(); ++i)
    if (!g.has_vertex(m[i]) || g.label(m[i]) != q.label(i)) return false;
  for (auto [a, b] : q.edges())
    if (!g.has_edge(m[a], m[b])) return false;
  return true;
}

}  // namespace dsm
