#include "dsm/substructure.hpp"

#include "dsm/error.hpp"

namespace dsm::oracle {

std::vector<EmbeddingVector> enumerate_substructure_embeddings(const DynamicGraph& g, VertexId v,
                                                               std::size_t delta,
                                                               const EmbeddingConfig& cfg) {
  const std::size_t deg = g.degree(v);
  if (deg > kMaxSubstructureDegree)
    throw Error(ErrorKind::DegreeTooLarge, "vertex " + std::to_string(v) + " has degree " +
                                               std::to_string(deg));
  if (delta < 1 || delta > deg)
    throw Error(ErrorKind::DegreeOutOfRange, "delta " + std::to_string(delta) + " outside [1, " +
                                                 std::to_string(deg) + "]");
  const auto nb = g.neighbors(v);
  std::vector<SpurVector> leaf;
  for (VertexId w : nb) leaf.push_back(spur(g.label(w), cfg));
  const SpurVector x = spur(g.label(v), cfg);
  const BaseVector z = cfg.mode == EmbeddingMode::Plain ? BaseVector(cfg.dim()) : base(g.label(v), cfg);

  std::vector<EmbeddingVector> out;
  for (std::uint32_t subset = 0; subset < (1u << deg); ++subset) {
    if (static_cast<std::size_t>(__builtin_popcount(subset)) != delta) continue;
    SpanVector y(cfg.d);
    for (std::size_t i = 0; i < deg; ++i)
      if (subset >> i & 1u)
        for (std::size_t k = 0; k < cfg.d; ++k) y[k] += leaf[i][k];
    out.push_back(embed(x, y, z, cfg));
  }
  return out;
}

}  // namespace dsm::oracle
