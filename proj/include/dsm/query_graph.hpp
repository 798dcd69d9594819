#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsm/graph_store.hpp"

namespace dsm {

using QueryVertex = std::uint32_t;

// Connected query pattern with dense vertex ids 0..n-1.
class QueryGraph {
 public:
  QueryGraph() = default;
  QueryGraph(std::vector<Label> labels, std::span<const std::pair<QueryVertex, QueryVertex>> edges);

  // Requires ids 0..n-1 exactly.
  static QueryGraph from_graph(const DynamicGraph& g);
  DynamicGraph to_graph() const;

  std::size_t size() const noexcept { return labels_.size(); }
  Label label(QueryVertex q) const { return labels_[q]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  std::span<const QueryVertex> neighbors(QueryVertex q) const { return adj_[q]; }
  std::size_t degree(QueryVertex q) const { return adj_[q].size(); }
  bool has_edge(QueryVertex a, QueryVertex b) const;
  // Each edge once as (smaller, larger), ascending.
  std::span<const std::pair<QueryVertex, QueryVertex>> edges() const noexcept { return edges_; }

 private:
  std::vector<Label> labels_;
  std::vector<std::vector<QueryVertex>> adj_;
  std::vector<std::pair<QueryVertex, QueryVertex>> edges_;
};

// Image of a query under an injective mapping, indexed by query vertex id.
using Mapping = std::vector<VertexId>;

// `match q0->3 q1->7 ...`
std::string format_mapping(const Mapping& m);

// True iff m is injective, label-preserving and edge-preserving in g.
bool is_valid_mapping(const DynamicGraph& g, const QueryGraph& q, const Mapping& m);

}  // namespace dsm
