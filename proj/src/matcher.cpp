#include "dsm/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>

#include "dsm/error.hpp"
#include "dsm/kernels.hpp"

namespace dsm {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

constexpr VertexId kFree = static_cast<VertexId>(-1);

class Refiner {
 public:
  Refiner(const DynamicGraph& g, const QueryGraph& q, const QueryPlan& plan,
          std::span<const VertexId> roots, const Admission& admit,
          const std::function<void(const Mapping&)>& emit)
      : g_(g), q_(q), plan_(plan), roots_(roots), admit_(admit), emit_(emit),
        mapping_(q.size(), kFree), position_(q.size()), back_(q.size()) {
    for (std::size_t n = 0; n < plan.size(); ++n) position_[plan[n]] = n;
    for (std::size_t n = 0; n < plan.size(); ++n)
      for (QueryVertex w : q.neighbors(plan[n]))
        if (position_[w] < n) back_[n].push_back(w);
  }

  void run(std::span<const VertexId> seed, std::size_t depth) {
    for (std::size_t n = 0; n < depth; ++n) mapping_[plan_[n]] = seed[n];
    extend(depth);
  }

 private:
  bool used(VertexId u, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i)
      if (mapping_[plan_[i]] == u) return true;
    return false;
  }

  void try_vertex(std::size_t n, VertexId u, QueryVertex pivot) {
    const QueryVertex qv = plan_[n];
    if (g_.label(u) != q_.label(qv) || used(u, n)) return;
    for (QueryVertex w : back_[n])
      if (w != pivot && !g_.has_edge(mapping_[w], u)) return;
    if (!admit_(qv, u)) return;
    mapping_[qv] = u;
    extend(n + 1);
    mapping_[qv] = kFree;
  }

  void extend(std::size_t n) {
    if (n == plan_.size()) {
      emit_(mapping_);
      return;
    }
    if (back_[n].empty()) {
      for (VertexId u : roots_)
        if (g_.has_vertex(u)) try_vertex(n, u, kFree);
      return;
    }
    // Walk the adjacency of the earlier neighbor whose image has fewest edges.
    QueryVertex pivot = back_[n].front();
    for (QueryVertex w : back_[n])
      if (g_.degree(mapping_[w]) < g_.degree(mapping_[pivot])) pivot = w;
    for (VertexId u : g_.neighbors(mapping_[pivot])) try_vertex(n, u, pivot);
  }

  const DynamicGraph& g_;
  const QueryGraph& q_;
  const QueryPlan& plan_;
  std::span<const VertexId> roots_;
  const Admission& admit_;
  const std::function<void(const Mapping&)>& emit_;
  Mapping mapping_;
  std::vector<std::size_t> position_;
  std::vector<std::vector<QueryVertex>> back_;
};

std::uint64_t orientation_key(const QueryGraph& q, QueryVertex a, QueryVertex b) {
  return static_cast<std::uint64_t>(a) * q.size() + b;
}

}  // namespace

std::vector<EmbeddingVector> embed_query(const QueryGraph& q, const EmbeddingTable& emb) {
  const auto& cfg = emb.config();
  std::vector<EmbeddingVector> out;
  out.reserve(q.size());
  for (QueryVertex qv = 0; qv < q.size(); ++qv) {
    const LabelVectors lv = emb.vectors(q.label(qv));
    SpanVector y(cfg.d);
    for (QueryVertex w : q.neighbors(qv)) {
      const LabelVectors nb = emb.vectors(q.label(w));
      for (std::size_t k = 0; k < cfg.d; ++k) y[k] += nb.spur[k];
    }
    out.push_back(embed(lv.spur, y, lv.base, cfg));
  }
  return out;
}

QueryPlan make_plan(const QueryGraph& q, std::span<const std::size_t> cand_sizes,
                    std::span<const QueryVertex> prefix) {
  const std::size_t n = q.size();
  QueryPlan plan(prefix.begin(), prefix.end());
  std::vector<bool> in_plan(n, false);
  for (QueryVertex v : plan) in_plan[v] = true;
  if (plan.empty()) {
    QueryVertex first = 0;
    for (QueryVertex v = 1; v < n; ++v)
      if (cand_sizes[v] < cand_sizes[first]) first = v;
    plan.push_back(first);
    in_plan[first] = true;
  }
  while (plan.size() < n) {
    QueryVertex pick = kFree;
    for (QueryVertex v = 0; v < n; ++v) {
      if (in_plan[v]) continue;
      const auto nb = q.neighbors(v);
      if (std::none_of(nb.begin(), nb.end(), [&](QueryVertex w) { return in_plan[w]; })) continue;
      if (pick == kFree || cand_sizes[v] < cand_sizes[pick]) pick = v;
    }
    plan.push_back(pick);
    in_plan[pick] = true;
  }
  return plan;
}

bool is_valid_plan(const QueryGraph& q, const QueryPlan& plan) {
  if (plan.size() != q.size()) return false;
  std::vector<bool> seen(q.size(), false);
  for (std::size_t n = 0; n < plan.size(); ++n) {
    if (plan[n] >= q.size() || seen[plan[n]]) return false;
    if (n > 0) {
      const auto nb = q.neighbors(plan[n]);
      if (std::none_of(nb.begin(), nb.end(), [&](QueryVertex w) { return seen[w]; })) return false;
    }
    seen[plan[n]] = true;
  }
  return true;
}

void refine_each(const DynamicGraph& g, const QueryGraph& q, const QueryPlan& plan,
                 std::span<const VertexId> roots, const Admission& admit,
                 std::span<const VertexId> seed, std::size_t depth,
                 const std::function<void(const Mapping&)>& emit) {
  Refiner(g, q, plan, roots, admit, emit).run(seed, depth);
}

std::set<Mapping> refine(const DynamicGraph& g, const QueryGraph& q, const QueryPlan& plan,
                         const CandidateSets& cands, std::span<const VertexId> seed,
                         std::size_t depth) {
  std::set<Mapping> out;
  const Admission admit = [&](QueryVertex qv, VertexId u) {
    return std::binary_search(cands[qv].begin(), cands[qv].end(), u);
  };
  const std::function<void(const Mapping&)> emit = [&](const Mapping& m) { out.insert(m); };
  refine_each(g, q, plan, cands[plan[0]], admit, seed, depth, emit);
  return out;
}

// ---- answers ---------------------------------------------------------------

bool AnswerSet::insert(const Mapping& m, const QueryGraph& q) {
  auto [it, fresh] = by_mapping_.try_emplace(m, next_id_);
  if (!fresh) return false;
  const AnswerId id = next_id_++;
  by_id_.emplace(id, m);
  for (auto [a, b] : q.edges()) by_edge_[edge_key(m[a], m[b])].insert(id);
  return true;
}

void AnswerSet::erase(AnswerId id, const QueryGraph& q) {
  auto it = by_id_.find(id);
  const Mapping& m = it->second;
  for (auto [a, b] : q.edges()) {
    auto e = by_edge_.find(edge_key(m[a], m[b]));
    e->second.erase(id);
    if (e->second.empty()) by_edge_.erase(e);
  }
  by_mapping_.erase(m);
  by_id_.erase(it);
}

std::vector<Mapping> AnswerSet::remove_edge(EdgeKey e, const QueryGraph& q, DeletionMode mode) {
  std::vector<AnswerId> doomed;
  if (mode == DeletionMode::Indexed) {
    if (auto it = by_edge_.find(e); it != by_edge_.end())
      doomed.assign(it->second.begin(), it->second.end());
  } else {
    for (const auto& [m, id] : by_mapping_)
      for (auto [a, b] : q.edges())
        if (edge_key(m[a], m[b]) == e) {
          doomed.push_back(id);
          break;
        }
  }
  std::vector<Mapping> removed;
  removed.reserve(doomed.size());
  for (AnswerId id : doomed) {
    removed.push_back(by_id_.at(id));
    erase(id, q);
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

std::vector<Mapping> AnswerSet::sorted() const {
  std::vector<Mapping> out;
  out.reserve(by_mapping_.size());
  for (const auto& [m, id] : by_mapping_) out.push_back(m);
  return out;
}

bool AnswerSet::index_consistent(const QueryGraph& q) const {
  std::unordered_map<EdgeKey, std::unordered_set<AnswerId>> expect;
  for (const auto& [m, id] : by_mapping_) {
    auto it = by_id_.find(id);
    if (it == by_id_.end() || it->second != m) return false;
    for (auto [a, b] : q.edges()) expect[edge_key(m[a], m[b])].insert(id);
  }
  return by_id_.size() == by_mapping_.size() && expect == by_edge_;
}

// ---- engine pieces ---------------------------------------------------------

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  graph_us += o.graph_us;
  embedding_us += o.embedding_us;
  synopsis_us += o.synopsis_us;
  filter_us += o.filter_us;
  refine_us += o.refine_us;
  return *this;
}

void initial_match(const DynamicGraph& g, const EmbeddingTable& emb, const SynopsisIndex& index,
                   RegisteredQuery& rq, const FaultInjection& faults, StageTimes* times) {
  const QueryGraph& q = rq.graph;
  const ScanOptions opts{!faults.skip_mbr};
  auto start = Clock::now();
  rq.embeddings = embed_query(q, emb);
  rq.cands.assign(q.size(), {});
  rq.scan_stats.assign(q.size(), {});
  std::vector<std::size_t> sizes(q.size());
  for (QueryVertex qv = 0; qv < q.size(); ++qv) {
    ScanResult r = index.scan(rq.embeddings[qv], q.degree(qv), q.label(qv), emb, opts);
    rq.cands[qv] = std::move(r.candidates);
    rq.scan_stats[qv] = r.stats;
    sizes[qv] = rq.cands[qv].size();
  }
  rq.plan = make_plan(q, sizes);
  rq.insert_plans.clear();
  for (auto [a, b] : q.edges()) {
    const QueryVertex ab[2] = {a, b};
    const QueryVertex ba[2] = {b, a};
    rq.insert_plans[orientation_key(q, a, b)] = make_plan(q, sizes, ab);
    rq.insert_plans[orientation_key(q, b, a)] = make_plan(q, sizes, ba);
  }
  if (times) times->filter_us += micros_since(start);

  start = Clock::now();
  rq.answers = AnswerSet{};
  const auto& cands = rq.cands;
  const Admission admit = [&](QueryVertex qv, VertexId u) {
    return std::binary_search(cands[qv].begin(), cands[qv].end(), u);
  };
  const std::function<void(const Mapping&)> emit = [&](const Mapping& m) { rq.answers.insert(m, q); };
  refine_each(g, q, rq.plan, cands[rq.plan[0]], admit, {}, 0, emit);
  if (times) times->refine_us += micros_since(start);
}

std::vector<Mapping> on_insert(const DynamicGraph& g, const EmbeddingTable& emb,
                               const SynopsisIndex& index, RegisteredQuery& rq, VertexId vi,
                               VertexId vj, const FaultInjection& faults, StageTimes* times) {
  const QueryGraph& q = rq.graph;
  const ScanOptions opts{!faults.skip_mbr};
  const auto& kern = kernels::active();
  const Label li = g.label(vi);
  const Label lj = g.label(vj);

  // Per-endpoint test: label, dominance on the full embedding, MBR at deg(q).
  auto endpoint_ok = [&](QueryVertex qv, VertexId v, Label lv) {
    if (q.label(qv) != lv) return false;
    const EmbeddingVector& qe = rq.embeddings[qv];
    if (!kern.dominates(qe.data(), emb.embedding_of(v).data(), qe.size())) return false;
    if (!opts.use_mbr) return true;
    return g.degree(v) >= q.degree(qv) && index.mbr(v, lv, q.degree(qv), emb).contains(qe);
  };
  const Admission admit = [&](QueryVertex qv, VertexId u) {
    return index.admits(u, g.label(u), rq.embeddings[qv], q.degree(qv), q.label(qv), emb, opts);
  };

  std::vector<Mapping> added;
  const std::function<void(const Mapping&)> emit = [&](const Mapping& m) {
    if (rq.answers.insert(m, q)) added.push_back(m);
  };
  for (auto [a, b] : q.edges()) {
    const std::pair<QueryVertex, QueryVertex> orientations[2] = {{a, b}, {b, a}};
    const int tries = faults.single_orientation ? 1 : 2;
    for (int o = 0; o < tries; ++o) {
      const auto [qa, qb] = orientations[o];
      auto start = Clock::now();
      const bool pass = endpoint_ok(qa, vi, li) && endpoint_ok(qb, vj, lj);
      if (times) times->filter_us += micros_since(start);
      if (!pass) continue;
      start = Clock::now();
      const VertexId seed[2] = {vi, vj};
      refine_each(g, q, rq.insert_plans.at(orientation_key(q, qa, qb)), {}, admit, seed, 2, emit);
      if (times) times->refine_us += micros_since(start);
    }
  }
  std::sort(added.begin(), added.end());
  return added;
}

std::vector<Mapping> on_delete(RegisteredQuery& rq, VertexId vi, VertexId vj, DeletionMode mode) {
  return rq.answers.remove_edge(edge_key(vi, vj), rq.graph, mode);
}

Engine::Engine(DynamicGraph g0, EngineConfig cfg)
    : cfg_(std::move(cfg)), graph_(std::move(g0)), emb_(graph_, cfg_.embedding),
      index_(graph_, emb_, cfg_.synopsis) {}

std::size_t Engine::register_query(QueryGraph q) {
  std::unique_lock lock(mu_);
  RegisteredQuery rq;
  rq.graph = std::move(q);
  StageTimes t;
  initial_match(graph_, emb_, index_, rq, cfg_.faults, &t);
  queries_.push_back(std::move(rq));
  return queries_.size() - 1;
}

UpdateReport Engine::process_update(const UpdateOp& op) {
  std::unique_lock lock(mu_);
  UpdateReport report;
  auto start = Clock::now();
  report.effect = graph_.apply(op);
  report.times.graph_us = micros_since(start);

  start = Clock::now();
  emb_.apply(graph_, report.effect);
  report.times.embedding_us = micros_since(start);

  start = Clock::now();
  index_.maintain(graph_, emb_, report.effect);
  report.times.synopsis_us = micros_since(start);

  const VertexId vi = report.effect.endpoints[0].vertex;
  const VertexId vj = report.effect.endpoints[1].vertex;
  report.deltas.reserve(queries_.size());
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    QueryDelta delta;
    delta.query = i;
    if (report.effect.kind == UpdateKind::Insert) {
      delta.added = on_insert(graph_, emb_, index_, queries_[i], vi, vj, cfg_.faults, &delta.times);
    } else {
      start = Clock::now();
      delta.removed = on_delete(queries_[i], vi, vj, cfg_.deletion);
      delta.times.refine_us += micros_since(start);
    }
    report.times += delta.times;
    report.deltas.push_back(std::move(delta));
  }
  cumulative_ += report.times;
  return report;
}

std::size_t Engine::query_count() const {
  std::shared_lock lock(mu_);
  return queries_.size();
}

std::vector<Mapping> Engine::answers(std::size_t query) const {
  std::shared_lock lock(mu_);
  return queries_.at(query).answers.sorted();
}

ScanResult Engine::scan(std::size_t query, QueryVertex qv) const {
  std::shared_lock lock(mu_);
  const RegisteredQuery& rq = queries_.at(query);
  return index_.scan(rq.embeddings[qv], rq.graph.degree(qv), rq.graph.label(qv), emb_,
                     ScanOptions{!cfg_.faults.skip_mbr});
}

}  // namespace dsm
