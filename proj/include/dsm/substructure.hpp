#pragma once

#include <vector>

#include "dsm/embedding.hpp"
#include "dsm/graph_store.hpp"

namespace dsm::oracle {

inline constexpr std::size_t kMaxSubstructureDegree = 20;

// Embeddings of all C(deg(v), delta) stars centered at v with exactly delta
// of its neighbors as leaves, one per leaf subset (equal vectors repeat).
// Recomputes every SPUR and base vector from scratch; shares nothing with the
// synopses. DegreeTooLarge past kMaxSubstructureDegree, DegreeOutOfRange
// unless 1 <= delta <= deg(v).
std::vector<EmbeddingVector> enumerate_substructure_embeddings(const DynamicGraph& g, VertexId v,
                                                               std::size_t delta,
                                                               const EmbeddingConfig& cfg);

}  // namespace dsm::oracle
