#include "dsm/cost_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dsm/error.hpp"
#include "dsm/matcher.hpp"

namespace dsm {

DimStats collect_stats(std::span<const EmbeddingVector> embeddings) {
  if (embeddings.size() < 2)
    throw Error(ErrorKind::TooFewVertices, "variance needs at least two vertices, got " +
                                               std::to_string(embeddings.size()));
  const std::size_t dim = embeddings.front().size();
  const double n = static_cast<double>(embeddings.size());
  DimStats s;
  s.count = embeddings.size();
  s.mean.assign(dim, 0);
  s.variance.assign(dim, 0);
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw Error(ErrorKind::DimensionMismatch, "embeddings differ in dimension");
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] += e[j];
  }
  for (double& m : s.mean) m /= n;
  for (const auto& e : embeddings)
    for (std::size_t j = 0; j < dim; ++j) {
      const double dev = e[j] - s.mean[j];
      s.variance[j] += dev * dev;
    }
  for (double& v : s.variance) v /= n - 1;
  return s;
}

DimStats collect_stats(const DynamicGraph& g, const EmbeddingTable& emb) {
  std::vector<EmbeddingVector> all;
  for (VertexId v : g.vertices()) all.push_back(emb.embedding_of(v));
  return collect_stats(all);
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

CostEstimate estimate_cost(const EmbeddingVector& q, const DimStats& stats, std::size_t n_vertices,
                           CostModelOptions opts) {
  if (q.size() != stats.mean.size())
    throw Error(ErrorKind::DimensionMismatch, "query embedding does not match the statistics");
  CostEstimate out;
  out.estimate = static_cast<double>(n_vertices);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double var = stats.variance[j];
    double f;
    if (var <= 0) {
      if (opts.degenerate == DegeneratePolicy::Strict)
        throw Error(ErrorKind::DegenerateVariance, "zero variance in dimension " + std::to_string(j));
      f = stats.mean[j] >= q[j] ? 1.0 : 0.0;
    } else {
      const double scale = opts.form == SigmaForm::Variance ? var : std::sqrt(var);
      f = phi((stats.mean[j] - q[j]) / scale);
    }
    out.factors.push_back(f);
    out.estimate *= f;
  }
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimensionMismatch, "spearman needs equally long samples");
  if (a.size() < 2) return 0;
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0;
  return sab / std::sqrt(saa * sbb);
}

ModeComparison compare_embedding_modes(const DynamicGraph& g, std::span<const QueryGraph> queries,
                                       const EmbeddingConfig& base_cfg, const SynopsisConfig& syn,
                                       std::span<const EmbeddingMode> modes,
                                       const std::string& graph_name, CostModelOptions opts) {
  using Clock = std::chrono::steady_clock;
  ModeComparison out;
  for (EmbeddingMode mode : modes) {
    EmbeddingConfig cfg = base_cfg;
    cfg.mode = mode;
    const EmbeddingTable emb(g, cfg);
    const SynopsisIndex index(g, emb, syn);
    const DimStats stats = collect_stats(g, emb);
    ModeSummary summary;
    summary.mode = mode;
    double pp_sum = 0;
    std::size_t pp_count = 0;
    double est_sum = 0;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const QueryGraph& q = queries[qi];
      const auto qe = embed_query(q, emb);
      ModeRow row;
      row.mode = mode;
      row.graph = graph_name;
      row.query_id = qi;
      double row_pp = 0;
      std::size_t row_pp_n = 0;
      for (QueryVertex qv = 0; qv < q.size(); ++qv) {
        const auto start = Clock::now();
        const ScanResult r = index.scan(qe[qv], q.degree(qv), q.label(qv), emb);
        row.wall_clock_us += std::chrono::duration<double, std::micro>(Clock::now() - start).count();
        if (r.stats.entries_examined > 0) {
          row_pp += r.stats.pruning_power();
          ++row_pp_n;
        }
        row.estimated_cost += estimate_cost(qe[qv], stats, g.vertex_count(), opts).estimate;
        row.measured_candidates += static_cast<double>(r.stats.dominance_pass);
      }
      row.pruning_power = row_pp_n ? row_pp / static_cast<double>(row_pp_n) : std::nan("");
      row.estimated_cost /= static_cast<double>(q.size());
      row.measured_candidates /= static_cast<double>(q.size());
      if (row_pp_n) {
        pp_sum += row.pruning_power;
        ++pp_count;
      }
      est_sum += row.estimated_cost;
      summary.total_wall_clock_us += row.wall_clock_us;
      out.rows.push_back(row);
    }
    summary.mean_pruning_power = pp_count ? pp_sum / static_cast<double>(pp_count) : std::nan("");
    summary.mean_estimated_cost = queries.empty() ? 0 : est_sum / static_cast<double>(queries.size());
    out.summaries.push_back(summary);
  }
  return out;
}

void write_mode_csv(std::ostream& out, std::span<const ModeRow> rows, bool header) {
  if (header)
    out << "mode,graph,query_id,pruning_power,estimated_cost,measured_candidates,wall_clock_us\n";
  for (const auto& r : rows)
    out << to_string(r.mode) << ',' << r.graph << ',' << r.query_id << ',' << r.pruning_power << ','
        << r.estimated_cost << ',' << r.measured_candidates << ',' << r.wall_clock_us << '\n';
}

}  // namespace dsm
