#pragma once

#include <doctest.h>

#include <string>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/graph_store.hpp"
#include "dsm/query_graph.hpp"

namespace dsm::test {

inline DynamicGraph make_graph(const std::vector<Label>& labels,
                               const std::vector<std::pair<VertexId, VertexId>>& edges) {
  DynamicGraph g;
  for (VertexId v = 0; v < labels.size(); ++v) g.add_vertex(v, labels[v]);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

inline QueryGraph make_query(const std::vector<Label>& labels,
                             const std::vector<std::pair<QueryVertex, QueryVertex>>& edges) {
  return QueryGraph(labels, edges);
}

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a dsm::Error");
  return ErrorKind::InvalidParams;
}

}  // namespace dsm::test
