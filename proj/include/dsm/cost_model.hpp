#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dsm/das3.hpp"
#include "dsm/embedding.hpp"
#include "dsm/query_graph.hpp"

namespace dsm {

// Per-dimension sample mean and unbiased variance of vertex embeddings.
struct DimStats {
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t count = 0;
};

// TooFewVertices for fewer than two embeddings.
DimStats collect_stats(std::span<const EmbeddingVector> embeddings);
DimStats collect_stats(const DynamicGraph& g, const EmbeddingTable& emb);

// Standard normal CDF, via erfc for accuracy in both tails.
double phi(double x);

// The printed estimator divides by the variance; StdDev divides by sigma.
enum class SigmaForm { Variance, StdDev };
// Zero variance: PointMass scores the dimension 1 if mu >= q else 0; Strict
// raises DegenerateVariance.
enum class DegeneratePolicy { PointMass, Strict };

struct CostModelOptions {
  SigmaForm form = SigmaForm::Variance;
  DegeneratePolicy degenerate = DegeneratePolicy::PointMass;
};

struct CostEstimate {
  double estimate = 0;
  std::vector<double> factors;
};

// n * prod_j phi((mu_j - q_j) / s_j).
CostEstimate estimate_cost(const EmbeddingVector& q, const DimStats& stats, std::size_t n_vertices,
                           CostModelOptions opts = {});

// Rank correlation with average ranks for ties; 0 if either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

struct ModeRow {
  EmbeddingMode mode = EmbeddingMode::CostModel;
  std::string graph;
  std::size_t query_id = 0;
  double pruning_power = 0;       // mean over query vertices that examined anything; NaN if none
  double estimated_cost = 0;      // mean over query vertices
  double measured_candidates = 0;  // mean dominance-pass count over query vertices
  double wall_clock_us = 0;       // scans of all query vertices
};

struct ModeSummary {
  EmbeddingMode mode = EmbeddingMode::CostModel;
  double mean_pruning_power = 0;
  double mean_estimated_cost = 0;
  double total_wall_clock_us = 0;
};

struct ModeComparison {
  std::vector<ModeRow> rows;
  std::vector<ModeSummary> summaries;
};

// Builds embeddings and synopses per mode over the same graph and queries.
ModeComparison compare_embedding_modes(const DynamicGraph& g, std::span<const QueryGraph> queries,
                                       const EmbeddingConfig& base_cfg, const SynopsisConfig& syn,
                                       std::span<const EmbeddingMode> modes,
                                       const std::string& graph_name = "graph",
                                       CostModelOptions opts = {});

// `mode,graph,query_id,pruning_power,estimated_cost,measured_candidates,wall_clock_us`
void write_mode_csv(std::ostream& out, std::span<const ModeRow> rows, bool header = true);

}  // namespace dsm
