#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dsm/das3.hpp"
#include "dsm/embedding.hpp"
#include "dsm/graph_store.hpp"
#include "dsm/query_graph.hpp"

namespace dsm {

// Embeds each query vertex exactly as a data vertex with the same label and
// neighbor label multiset.
std::vector<EmbeddingVector> embed_query(const QueryGraph& q, const EmbeddingTable& emb);

using CandidateSets = std::vector<std::vector<VertexId>>;  // per query vertex, ascending
using QueryPlan = std::vector<QueryVertex>;

// Greedy connected order: smallest candidate set first, then repeatedly the
// frontier vertex with the smallest set; ties go to the smaller id. A
// non-empty `prefix` is taken verbatim as the first positions.
QueryPlan make_plan(const QueryGraph& q, std::span<const std::size_t> cand_sizes,
                    std::span<const QueryVertex> prefix = {});
bool is_valid_plan(const QueryGraph& q, const QueryPlan& plan);

// Candidate test for a query vertex at plan positions past the seed.
using Admission = std::function<bool(QueryVertex, VertexId)>;

// Depth-first extension of a seed covering plan positions [0, depth) (seed[n]
// is the image of plan[n]). A data vertex u extends position n iff its label
// matches, it is unused, every query edge back to positions < n has a data
// edge, and admit(plan[n], u) holds. Position 0, when free, iterates `roots`.
// Emits normalized mappings (indexed by query vertex id).
void refine_each(const DynamicGraph& g, const QueryGraph& q, const QueryPlan& plan,
                 std::span<const VertexId> roots, const Admission& admit,
                 std::span<const VertexId> seed, std::size_t depth,
                 const std::function<void(const Mapping&)>& emit);

// Candidate-set form: u must lie in cands[plan[n]].
std::set<Mapping> refine(const DynamicGraph& g, const QueryGraph& q, const QueryPlan& plan,
                         const CandidateSets& cands, std::span<const VertexId> seed,
                         std::size_t depth);

enum class DeletionMode { Indexed, Scan };

// Mappings of one query with an inverted index from data edge to the answers
// whose edge image contains it.
class AnswerSet {
 public:
  // False if m is already present.
  bool insert(const Mapping& m, const QueryGraph& q);
  // Removes and returns (ascending) every answer whose edge image holds e.
  std::vector<Mapping> remove_edge(EdgeKey e, const QueryGraph& q,
                                   DeletionMode mode = DeletionMode::Indexed);

  std::size_t size() const noexcept { return by_mapping_.size(); }
  bool contains(const Mapping& m) const { return by_mapping_.count(m) != 0; }
  std::vector<Mapping> sorted() const;
  // True iff the inverted index covers exactly the edge images of the answers.
  bool index_consistent(const QueryGraph& q) const;

 private:
  using AnswerId = std::uint64_t;
  void erase(AnswerId id, const QueryGraph& q);

  std::map<Mapping, AnswerId> by_mapping_;
  std::unordered_map<AnswerId, Mapping> by_id_;
  std::unordered_map<EdgeKey, std::unordered_set<AnswerId>> by_edge_;
  AnswerId next_id_ = 0;
};

struct RegisteredQuery {
  QueryGraph graph;
  std::vector<EmbeddingVector> embeddings;
  CandidateSets cands;
  std::vector<ScanStats> scan_stats;  // per query vertex, from the initial scan
  QueryPlan plan;
  AnswerSet answers;
  // Plan used when query edge orientation (a, b) is seeded by an insertion,
  // keyed by a * |V(q)| + b.
  std::unordered_map<std::uint64_t, QueryPlan> insert_plans;
};

// Test-only switches that weaken the engine on purpose.
struct FaultInjection {
  bool skip_mbr = false;            // drop the MBR filter everywhere
  bool single_orientation = false;  // try only (a, b) for each query edge on insertion
};

struct EngineConfig {
  EmbeddingConfig embedding;
  SynopsisConfig synopsis;
  DeletionMode deletion = DeletionMode::Indexed;
  FaultInjection faults;
};

struct StageTimes {
  double graph_us = 0;
  double embedding_us = 0;
  double synopsis_us = 0;
  double filter_us = 0;
  double refine_us = 0;

  double total_us() const { return graph_us + embedding_us + synopsis_us + filter_us + refine_us; }
  StageTimes& operator+=(const StageTimes& o);
};

struct QueryDelta {
  std::size_t query = 0;
  std::vector<Mapping> added;    // ascending
  std::vector<Mapping> removed;  // ascending
  StageTimes times;              // filter and refine share of this query
};

struct UpdateReport {
  UpdateEffect effect;
  std::vector<QueryDelta> deltas;  // one per registered query
  StageTimes times;
};

// Candidate sets from the synopses, plan, and exhaustive refinement.
void initial_match(const DynamicGraph& g, const EmbeddingTable& emb, const SynopsisIndex& index,
                   RegisteredQuery& rq, const FaultInjection& faults = {},
                   StageTimes* times = nullptr);

// New answers created by inserting the (already applied) edge (vi, vj).
std::vector<Mapping> on_insert(const DynamicGraph& g, const EmbeddingTable& emb,
                               const SynopsisIndex& index, RegisteredQuery& rq, VertexId vi,
                               VertexId vj, const FaultInjection& faults = {},
                               StageTimes* times = nullptr);

// Answers destroyed by deleting edge (vi, vj).
std::vector<Mapping> on_delete(RegisteredQuery& rq, VertexId vi, VertexId vj,
                               DeletionMode mode = DeletionMode::Indexed);

// Continuous matching engine. process_update and register_query take the
// writer lock; the const accessors take a reader lock.
class Engine {
 public:
  Engine(DynamicGraph g0, EngineConfig cfg = {});

  std::size_t register_query(QueryGraph q);
  UpdateReport process_update(const UpdateOp& op);

  std::size_t query_count() const;
  std::vector<Mapping> answers(std::size_t query) const;
  // Fresh synopsis scan for one query vertex against the current snapshot.
  ScanResult scan(std::size_t query, QueryVertex qv) const;

  // Unsynchronized views for single-threaded callers.
  const DynamicGraph& graph() const noexcept { return graph_; }
  const EmbeddingTable& embeddings() const noexcept { return emb_; }
  const SynopsisIndex& synopses() const noexcept { return index_; }
  const RegisteredQuery& query(std::size_t i) const { return queries_.at(i); }
  const EngineConfig& config() const noexcept { return cfg_; }
  const StageTimes& cumulative_times() const noexcept { return cumulative_; }

 private:
  EngineConfig cfg_;
  DynamicGraph graph_;
  EmbeddingTable emb_;
  SynopsisIndex index_;
  std::vector<RegisteredQuery> queries_;
  StageTimes cumulative_;
  mutable std::shared_mutex mu_;
};

}  // namespace dsm
