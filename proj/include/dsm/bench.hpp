#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dsm/graph_store.hpp"
#include "dsm/matcher.hpp"
#include "dsm/query_graph.hpp"

namespace dsm::bench {

// mt19937_64 with distribution code of our own, so every draw is identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform01();                   // [0, 1)
  std::uint64_t below(std::uint64_t n);  // [0, n), unbiased
  double normal();                      // Box-Muller
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Independent child seed for a named purpose.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t purpose);

enum class LabelDistribution { Uniform, Gaussian, Zipf };
const char* to_string(LabelDistribution d) noexcept;
LabelDistribution parse_label_distribution(const std::string& name);

struct BenchConfig {
  EmbeddingConfig embedding;
  SynopsisConfig synopsis;
  std::size_t labels = 15;
  LabelDistribution label_distribution = LabelDistribution::Uniform;
  std::size_t vertices = 50000;
  double avg_degree = 5;
  // 0 / negative: derived from avg_degree by small_world_params.
  std::size_t ring_k = 0;
  double shortcut_p = -1;
  std::size_t query_count = 100;
  std::size_t query_size = 8;
  double query_avg_degree = 3;
  double insertion_rate = 0.1;
  double deletion_rate = 0;
  std::uint64_t seed = 1;

  // Desk-scale verification profile (|V| <= 1000).
  static BenchConfig desk();
};

struct SmallWorldParams {
  std::size_t k = 4;
  double p = 0.25;
};
// Even k below the target plus shortcut probability p = target / k - 1, so
// the expected degree k (1 + p) hits the target.
SmallWorldParams small_world_params(double avg_degree);

// Newman-Watts graph on vertices 0..n-1 with labels in [1, |labels|].
DynamicGraph generate_graph(const BenchConfig& cfg);
DynamicGraph generate_graph(std::size_t n, std::size_t k, double p, std::size_t labels,
                            LabelDistribution dist, std::uint64_t seed);

struct SplitStream {
  DynamicGraph g0;
  std::vector<UpdateOp> stream;
};
// Insertion mode removes round(rate |E|) random edges from g and replays them
// as `+` ops; deletion mode keeps g and emits `-` ops. InvalidRate unless both
// rates lie in [0, 0.5] and at most one is nonzero.
SplitStream split_stream(const DynamicGraph& g, double insertion_rate, double deletion_rate,
                         std::uint64_t seed);

// Connected subgraphs of g grown by random frontier expansion, spanning tree
// plus extra induced edges up to round(avg_deg * size / 2). Unsatisfiable if
// no component has `size` vertices.
std::vector<QueryGraph> sample_queries(const DynamicGraph& g, std::size_t count, std::size_t size,
                                       double avg_deg, std::uint64_t seed);

struct Divergence {
  std::size_t step = 0;  // updates applied so far (0 = initial answers)
  std::size_t query = 0;
  std::vector<Mapping> missing;
  std::vector<Mapping> extra;
};

struct Verdict {
  bool ok = true;
  std::size_t steps = 0;
  std::size_t comparisons = 0;
  std::optional<Divergence> first;
  // Oracle match images absent from a fresh synopsis scan (only when requested).
  std::size_t candidate_misses = 0;
  std::size_t candidate_checks = 0;
};

struct VerifyOptions {
  bool check_candidates = false;
  bool check_delete_modes = false;  // replay deletions in scan mode too
};

// Replays the stream through the engine and snapshot recompute in lockstep.
Verdict recompute_stream_check(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                               const std::vector<QueryGraph>& queries, const EngineConfig& cfg,
                               VerifyOptions opts = {});
void write_verdict(std::ostream& out, const Verdict& v);

struct QueryMetrics {
  std::size_t final_answers = 0;
  double pruning_power = 0;  // NaN when no vertex examined anything
  StageTimes times;          // filter/refine share of this query
};

struct RunMetrics {
  std::string mode;  // engine | naive
  std::size_t updates = 0;
  double total_us = 0;
  StageTimes stages;
  std::vector<QueryMetrics> queries;
};

// `deltas`, when given, receives `# t=<step> query=<i>` headers and +/- lines.
RunMetrics run_engine(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                      const std::vector<QueryGraph>& queries, const EngineConfig& cfg,
                      std::ostream* deltas = nullptr);
// Full oracle recompute of every query after every update.
RunMetrics run_naive(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                     const std::vector<QueryGraph>& queries, std::ostream* deltas = nullptr);

// Mean over query vertices that examined at least one entry; NaN if none did.
double mean_pruning_power(const std::vector<ScanStats>& per_vertex);

// mode,query_id,query_vertices,final_answers,pruning_power,total_us,graph_us,
// embedding_us,synopsis_us,filter_us,refine_us ; query_id "all" is the run total.
void write_metrics_csv(std::ostream& out, const RunMetrics& m,
                       const std::vector<QueryGraph>& queries, bool header = true,
                       const std::string& prefix_cols = "", const std::string& prefix_header = "");

// Query file: graphs in the data graph format, each introduced by `t`.
std::vector<QueryGraph> load_queries_file(const std::string& path);
void write_queries(std::ostream& out, const std::vector<QueryGraph>& queries);

}  // namespace dsm::bench
