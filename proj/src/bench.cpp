#include "dsm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

#include "dsm/embedding.hpp"
#include "dsm/error.hpp"
#include "dsm/oracle.hpp"

namespace dsm::bench {

namespace {
using Clock = std::chrono::steady_clock;
double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}
}  // namespace

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidParams, "empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return x % n;
}

double Rng::normal() {
  double u1;
  do u1 = uniform01();
  while (u1 == 0);
  const double u2 = uniform01();
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t purpose) {
  return mix64(mix64(master) ^ purpose);
}

const char* to_string(LabelDistribution d) noexcept {
  switch (d) {
    case LabelDistribution::Uniform: return "uniform";
    case LabelDistribution::Gaussian: return "gaussian";
    case LabelDistribution::Zipf: return "zipf";
  }
  return "?";
}

LabelDistribution parse_label_distribution(const std::string& name) {
  if (name == "uniform") return LabelDistribution::Uniform;
  if (name == "gaussian") return LabelDistribution::Gaussian;
  if (name == "zipf") return LabelDistribution::Zipf;
  throw Error(ErrorKind::InvalidConfig, "unknown label distribution '" + name + "'");
}

BenchConfig BenchConfig::desk() {
  BenchConfig cfg;
  cfg.vertices = 1000;
  cfg.query_count = 20;
  return cfg;
}

SmallWorldParams small_world_params(double avg_degree) {
  if (!(avg_degree >= 2)) throw Error(ErrorKind::InvalidParams, "average degree must be at least 2");
  std::size_t k = 2 * static_cast<std::size_t>(std::floor(avg_degree / 2));
  // Keep some shortcuts when the target is an even integer.
  if (static_cast<double>(k) == avg_degree && k > 2) k -= 2;
  return {k, avg_degree / static_cast<double>(k) - 1};
}

namespace {

enum Purpose : std::uint64_t { kGraph = 1, kLabels = 2, kSplit = 3, kQueries = 4 };

Label draw_label(Rng& rng, std::size_t labels, LabelDistribution dist,
                 const std::vector<double>& zipf_cdf) {
  switch (dist) {
    case LabelDistribution::Uniform:
      return static_cast<Label>(1 + rng.below(labels));
    case LabelDistribution::Gaussian: {
      const double mean = (static_cast<double>(labels) + 1) / 2;
      const double sd = static_cast<double>(labels) / 6;
      for (;;) {
        const double x = std::round(mean + sd * rng.normal());
        if (x >= 1 && x <= static_cast<double>(labels)) return static_cast<Label>(x);
      }
    }
    case LabelDistribution::Zipf: {
      const double u = rng.uniform01();
      auto it = std::upper_bound(zipf_cdf.begin(), zipf_cdf.end(), u);
      const auto rank = std::min<std::size_t>(it - zipf_cdf.begin(), labels - 1);
      return static_cast<Label>(rank + 1);
    }
  }
  return 1;
}

}  // namespace

DynamicGraph generate_graph(std::size_t n, std::size_t k, double p, std::size_t labels,
                            LabelDistribution dist, std::uint64_t seed) {
  if (k < 2 || k % 2 != 0) throw Error(ErrorKind::InvalidParams, "ring degree k must be even and >= 2");
  if (n < k + 1) throw Error(ErrorKind::InvalidParams, "need |V| >= k + 1");
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::InvalidParams, "shortcut probability outside [0, 1]");
  if (labels < 1) throw Error(ErrorKind::InvalidParams, "need at least one label");

  Rng label_rng(sub_seed(seed, kLabels));
  std::vector<double> zipf_cdf;
  if (dist == LabelDistribution::Zipf) {
    double total = 0;
    for (std::size_t r = 1; r <= labels; ++r) total += 1.0 / static_cast<double>(r);
    double acc = 0;
    for (std::size_t r = 1; r <= labels; ++r) {
      acc += 1.0 / static_cast<double>(r);
      zipf_cdf.push_back(acc / total);
    }
  }
  DynamicGraph g;
  for (VertexId v = 0; v < n; ++v) g.add_vertex(v, draw_label(label_rng, labels, dist, zipf_cdf));

  std::vector<std::pair<VertexId, VertexId>> lattice;
  for (VertexId u = 0; u < n; ++u)
    for (std::size_t j = 1; j <= k / 2; ++j) {
      const auto v = static_cast<VertexId>((u + j) % n);
      if (!g.has_edge(u, v)) {
        g.add_edge(u, v);
        lattice.emplace_back(u, v);
      }
    }
  Rng rng(sub_seed(seed, kGraph));
  for (auto [u, v] : lattice) {
    if (rng.uniform01() >= p) continue;
    if (g.degree(u) + 1 >= n) continue;
    VertexId w;
    do w = static_cast<VertexId>(rng.below(n));
    while (w == u || g.has_edge(u, w));
    g.add_edge(u, w);
  }
  return g;
}

DynamicGraph generate_graph(const BenchConfig& cfg) {
  SmallWorldParams sw{cfg.ring_k, cfg.shortcut_p};
  if (cfg.ring_k == 0 || cfg.shortcut_p < 0) {
    const auto derived = small_world_params(cfg.avg_degree);
    if (cfg.ring_k == 0) sw.k = derived.k;
    if (cfg.shortcut_p < 0) sw.p = cfg.avg_degree / static_cast<double>(sw.k) - 1;
  }
  return generate_graph(cfg.vertices, sw.k, sw.p, cfg.labels, cfg.label_distribution, cfg.seed);
}

SplitStream split_stream(const DynamicGraph& g, double insertion_rate, double deletion_rate,
                         std::uint64_t seed) {
  auto valid = [](double r) { return r >= 0 && r <= 0.5; };
  if (!valid(insertion_rate) || !valid(deletion_rate))
    throw Error(ErrorKind::InvalidRate, "rates must lie in [0, 0.5]");
  if (insertion_rate > 0 && deletion_rate > 0)
    throw Error(ErrorKind::InvalidRate, "insertion and deletion streams are separate runs");
  SplitStream out{g, {}};
  const double rate = std::max(insertion_rate, deletion_rate);
  auto edges = g.edges();
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(edges.size())));
  if (count == 0) return out;
  Rng rng(sub_seed(seed, kSplit));
  rng.shuffle(edges);
  edges.resize(count);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (rng.below(2)) std::swap(u, v);
    UpdateOp op = insertion_rate > 0 ? UpdateOp::insert(u, v, g.label(u), g.label(v)) : UpdateOp::erase(u, v);
    op.timestamp = static_cast<std::int64_t>(i + 1);
    if (insertion_rate > 0) out.g0.apply(UpdateOp::erase(u, v));
    out.stream.push_back(op);
  }
  return out;
}

std::vector<QueryGraph> sample_queries(const DynamicGraph& g, std::size_t count, std::size_t size,
                                       double avg_deg, std::uint64_t seed) {
  if (size < 2) throw Error(ErrorKind::InvalidParams, "queries need at least two vertices");
  Rng rng(sub_seed(seed, kQueries));
  std::vector<VertexId> starts;
  for (VertexId v : g.vertices())
    if (g.degree(v) > 0) starts.push_back(v);
  const auto target_edges = static_cast<std::size_t>(std::llround(avg_deg * static_cast<double>(size) / 2));

  std::vector<QueryGraph> out;
  for (std::size_t qi = 0; qi < count; ++qi) {
    rng.shuffle(starts);
    bool done = false;
    for (VertexId start : starts) {
      std::vector<VertexId> chosen{start};
      std::unordered_set<VertexId> in{start};
      std::vector<std::pair<VertexId, VertexId>> frontier;  // (outside vertex, inside parent)
      for (VertexId w : g.neighbors(start)) frontier.emplace_back(w, start);
      std::vector<std::pair<std::size_t, std::size_t>> tree;
      while (chosen.size() < size && !frontier.empty()) {
        const std::size_t pick = rng.below(frontier.size());
        const auto [w, parent] = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        if (in.count(w)) continue;
        const std::size_t parent_idx =
            static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), parent) - chosen.begin());
        tree.emplace_back(parent_idx, chosen.size());
        chosen.push_back(w);
        in.insert(w);
        for (VertexId x : g.neighbors(w))
          if (!in.count(x)) frontier.emplace_back(x, w);
      }
      if (chosen.size() < size) continue;

      std::set<std::pair<std::size_t, std::size_t>> edges;
      for (auto [a, b] : tree) edges.emplace(std::min(a, b), std::max(a, b));
      std::vector<std::pair<std::size_t, std::size_t>> extra;
      for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = a + 1; b < size; ++b)
          if (g.has_edge(chosen[a], chosen[b]) && !edges.count({a, b})) extra.emplace_back(a, b);
      rng.shuffle(extra);
      for (const auto& e : extra) {
        if (edges.size() >= target_edges) break;
        edges.insert(e);
      }
      std::vector<Label> labels;
      for (VertexId v : chosen) labels.push_back(g.label(v));
      std::vector<std::pair<QueryVertex, QueryVertex>> qedges;
      for (auto [a, b] : edges) qedges.emplace_back(static_cast<QueryVertex>(a), static_cast<QueryVertex>(b));
      out.emplace_back(std::move(labels), qedges);
      done = true;
      break;
    }
    if (!done)
      throw Error(ErrorKind::Unsatisfiable,
                  "no connected region with " + std::to_string(size) + " vertices");
  }
  return out;
}

namespace {

std::vector<Mapping> to_vector(const oracle::OracleAnswer& a) { return {a.begin(), a.end()}; }

bool compare(const std::vector<Mapping>& engine, const std::vector<Mapping>& truth, Divergence& d) {
  std::set_difference(truth.begin(), truth.end(), engine.begin(), engine.end(),
                      std::back_inserter(d.missing));
  std::set_difference(engine.begin(), engine.end(), truth.begin(), truth.end(),
                      std::back_inserter(d.extra));
  return d.missing.empty() && d.extra.empty();
}

}  // namespace

Verdict recompute_stream_check(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                               const std::vector<QueryGraph>& queries, const EngineConfig& cfg,
                               VerifyOptions opts) {
  Verdict verdict;
  Engine engine(g0, cfg);
  std::optional<Engine> scan_mode;
  if (opts.check_delete_modes) {
    EngineConfig alt = cfg;
    alt.deletion = cfg.deletion == DeletionMode::Indexed ? DeletionMode::Scan : DeletionMode::Indexed;
    scan_mode.emplace(g0, alt);
  }
  for (const auto& q : queries) {
    engine.register_query(q);
    if (scan_mode) scan_mode->register_query(q);
  }
  DynamicGraph snapshot = g0;

  auto check = [&](std::size_t step) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto truth = to_vector(oracle::enumerate_matches(snapshot, queries[i]));
      ++verdict.comparisons;
      Divergence d;
      d.step = step;
      d.query = i;
      bool same = compare(engine.answers(i), truth, d);
      if (same && scan_mode) same = compare(scan_mode->answers(i), truth, d);
      if (!same && verdict.ok) {
        verdict.ok = false;
        verdict.first = d;
      }
      if (opts.check_candidates) {
        for (QueryVertex qv = 0; qv < queries[i].size(); ++qv) {
          std::set<VertexId> images;
          for (const auto& m : truth) images.insert(m[qv]);
          if (images.empty()) continue;
          const auto cands = engine.scan(i, qv).candidates;
          for (VertexId v : images) {
            ++verdict.candidate_checks;
            if (!std::binary_search(cands.begin(), cands.end(), v)) ++verdict.candidate_misses;
          }
        }
      }
    }
    if (verdict.candidate_misses > 0) verdict.ok = false;
  };

  check(0);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    snapshot.apply(stream[t]);
    engine.process_update(stream[t]);
    if (scan_mode) scan_mode->process_update(stream[t]);
    ++verdict.steps;
    check(t + 1);
  }
  return verdict;
}

void write_verdict(std::ostream& out, const Verdict& v) {
  out << (v.ok ? "OK" : "DIVERGENCE") << " steps=" << v.steps << " comparisons=" << v.comparisons;
  if (v.candidate_checks) out << " candidate_checks=" << v.candidate_checks << " candidate_misses=" << v.candidate_misses;
  out << '\n';
  if (v.first) {
    out << "first divergence at step " << v.first->step << " query " << v.first->query << '\n';
    for (const auto& m : v.first->missing) out << "missing " << format_mapping(m) << '\n';
    for (const auto& m : v.first->extra) out << "extra " << format_mapping(m) << '\n';
  }
}

double mean_pruning_power(const std::vector<ScanStats>& per_vertex) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : per_vertex)
    if (s.entries_examined > 0) {
      sum += s.pruning_power();
      ++n;
    }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

namespace {

void write_delta(std::ostream& out, std::size_t step, std::size_t query,
                 const std::vector<Mapping>& added, const std::vector<Mapping>& removed) {
  if (added.empty() && removed.empty()) return;
  out << "# t=" << step << " query=" << query << '\n';
  for (const auto& m : added) out << '+' << format_mapping(m) << '\n';
  for (const auto& m : removed) out << '-' << format_mapping(m) << '\n';
}

}  // namespace

RunMetrics run_engine(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                      const std::vector<QueryGraph>& queries, const EngineConfig& cfg,
                      std::ostream* deltas) {
  RunMetrics m;
  m.mode = "engine";
  const auto start = Clock::now();
  Engine engine(g0, cfg);
  for (const auto& q : queries) engine.register_query(q);
  m.queries.resize(queries.size());
  if (deltas)
    for (std::size_t i = 0; i < queries.size(); ++i) write_delta(*deltas, 0, i, engine.answers(i), {});
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const UpdateReport r = engine.process_update(stream[t]);
    for (const auto& d : r.deltas) {
      m.queries[d.query].times += d.times;
      if (deltas) write_delta(*deltas, t + 1, d.query, d.added, d.removed);
    }
  }
  m.total_us = micros_since(start);
  m.updates = stream.size();
  m.stages = engine.cumulative_times();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    m.queries[i].final_answers = engine.query(i).answers.size();
    m.queries[i].pruning_power = mean_pruning_power(engine.query(i).scan_stats);
  }
  return m;
}

RunMetrics run_naive(const DynamicGraph& g0, const std::vector<UpdateOp>& stream,
                     const std::vector<QueryGraph>& queries, std::ostream* deltas) {
  RunMetrics m;
  m.mode = "naive";
  m.queries.resize(queries.size());
  const auto start = Clock::now();
  DynamicGraph g = g0;
  std::vector<oracle::OracleAnswer> current(queries.size());
  auto recompute = [&](std::size_t step) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto t0 = Clock::now();
      oracle::OracleAnswer next = oracle::enumerate_matches(g, queries[i]);
      m.queries[i].times.refine_us += micros_since(t0);
      if (deltas) {
        std::vector<Mapping> added, removed;
        std::set_difference(next.begin(), next.end(), current[i].begin(), current[i].end(),
                            std::back_inserter(added));
        std::set_difference(current[i].begin(), current[i].end(), next.begin(), next.end(),
                            std::back_inserter(removed));
        write_delta(*deltas, step, i, added, removed);
      }
      current[i] = std::move(next);
    }
  };
  recompute(0);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto t0 = Clock::now();
    g.apply(stream[t]);
    m.stages.graph_us += micros_since(t0);
    recompute(t + 1);
  }
  m.total_us = micros_since(start);
  m.updates = stream.size();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    m.queries[i].final_answers = current[i].size();
    m.queries[i].pruning_power = std::nan("");
    m.stages.refine_us += m.queries[i].times.refine_us;
  }
  return m;
}

void write_metrics_csv(std::ostream& out, const RunMetrics& m,
                       const std::vector<QueryGraph>& queries, bool header,
                       const std::string& prefix_cols, const std::string& prefix_header) {
  if (header)
    out << prefix_header
        << "mode,query_id,query_vertices,final_answers,pruning_power,total_us,graph_us,"
           "embedding_us,synopsis_us,filter_us,refine_us\n";
  auto times = [&](double total, const StageTimes& s) {
    out << total << ',' << s.graph_us << ',' << s.embedding_us << ',' << s.synopsis_us << ','
        << s.filter_us << ',' << s.refine_us << '\n';
  };
  std::size_t answers = 0;
  double pp_sum = 0;
  std::size_t pp_n = 0;
  for (std::size_t i = 0; i < m.queries.size(); ++i) {
    const auto& q = m.queries[i];
    answers += q.final_answers;
    if (!std::isnan(q.pruning_power)) {
      pp_sum += q.pruning_power;
      ++pp_n;
    }
    out << prefix_cols << m.mode << ',' << i << ',' << queries[i].size() << ',' << q.final_answers
        << ',' << q.pruning_power << ',';
    times(q.times.total_us(), q.times);
  }
  out << prefix_cols << m.mode << ",all," << m.queries.size() << ',' << answers << ','
      << (pp_n ? pp_sum / static_cast<double>(pp_n) : std::nan("")) << ',';
  times(m.total_us, m.stages);
}

std::vector<QueryGraph> load_queries_file(const std::string& path) {
  std::vector<QueryGraph> out;
  for (const auto& g : load_graphs_file(path)) out.push_back(QueryGraph::from_graph(g));
  return out;
}

void write_queries(std::ostream& out, const std::vector<QueryGraph>& queries) {
  for (const auto& q : queries) write_graph(out, q.to_graph());
}

}  // namespace dsm::bench
