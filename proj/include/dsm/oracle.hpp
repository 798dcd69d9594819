#pragma once

#include <set>

#include "dsm/graph_store.hpp"
#include "dsm/query_graph.hpp"

namespace dsm::oracle {

// Ground-truth answer: every injective, label- and edge-preserving mapping.
using OracleAnswer = std::set<Mapping>;

// Plain backtracking over label-filtered candidates. Query vertices are bound
// in ascending id order subject to connectivity (the next vertex is the
// smallest id adjacent to an already bound one). Touches nothing but the graph.
OracleAnswer enumerate_matches(const DynamicGraph& g, const QueryGraph& q);

// Same search, restricted to mappings that extend `seed` (entries equal to
// kUnbound are free).
inline constexpr VertexId kUnbound = static_cast<VertexId>(-1);
OracleAnswer enumerate_matches_extending(const DynamicGraph& g, const QueryGraph& q,
                                         const Mapping& seed);

std::size_t count_matches(const DynamicGraph& g, const QueryGraph& q);

}  // namespace dsm::oracle
