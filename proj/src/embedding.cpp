#include "dsm/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dsm/error.hpp"
#include "dsm/kernels.hpp"

namespace dsm {

const char* to_string(EmbeddingMode mode) noexcept {
  switch (mode) {
    case EmbeddingMode::Plain: return "plain";
    case EmbeddingMode::BaseOptimized: return "base";
    case EmbeddingMode::CostModel: return "cost";
  }
  return "?";
}

EmbeddingMode parse_embedding_mode(std::string_view name) {
  if (name == "plain") return EmbeddingMode::Plain;
  if (name == "base") return EmbeddingMode::BaseOptimized;
  if (name == "cost") return EmbeddingMode::CostModel;
  throw Error(ErrorKind::InvalidConfig, "unknown embedding mode '" + std::string(name) + "'");
}

void EmbeddingConfig::validate() const {
  if (d < 1 || d > kMaxSpurDim)
    throw Error(ErrorKind::InvalidConfig, "d must be in [1, " + std::to_string(kMaxSpurDim) + "]");
  if (mode != EmbeddingMode::Plain) {
    if (!(alpha > 0) || !(beta > 0))
      throw Error(ErrorKind::InvalidConfig, "alpha and beta must be positive");
    if (beta / alpha < 10) throw Error(ErrorKind::InvalidConfig, "beta/alpha must be at least 10");
  }
  if (mode == EmbeddingMode::CostModel) {
    if (!(zipf_exponent > 0)) throw Error(ErrorKind::InvalidConfig, "zipf exponent must be positive");
    if (zipf_buckets < 1 || zipf_ranks < zipf_buckets)
      throw Error(ErrorKind::InvalidConfig, "need zipf_ranks >= zipf_buckets >= 1");
  }
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(SeedStream stream, Label label, std::size_t component,
                          std::uint64_t salt) noexcept {
  std::uint64_t h = mix64(salt ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ label);
  return mix64(h ^ component);
}

double unit_interval_24(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 40) + 1) * 0x1p-24;
}

double quantize_24(double v) noexcept { return std::ceil(v * 0x1p24) * 0x1p-24; }

namespace {

class ZipfSampler {
 public:
  ZipfSampler(double s, std::uint32_t ranks, std::uint32_t buckets)
      : s_(s), ranks_(ranks), buckets_(buckets), cdf_(ranks + 1, 0.0), lo_(buckets), hi_(buckets) {
    long double total = 0;
    std::vector<long double> acc(ranks + 1, 0);
    for (std::uint32_t r = 1; r <= ranks; ++r) {
      total += std::pow(static_cast<long double>(r), -static_cast<long double>(s));
      acc[r] = total;
    }
    for (std::uint32_t r = 1; r < ranks; ++r) cdf_[r] = static_cast<double>(acc[r] / total);
    cdf_[ranks] = 1.0;
    for (std::uint32_t i = 0; i < buckets; ++i) {
      lo_[i] = inverse(static_cast<double>(i) / buckets, 1, ranks);
      hi_[i] = inverse(static_cast<double>(i + 1) / buckets, 1, ranks);
    }
  }

  bool matches(double s, std::uint32_t ranks, std::uint32_t buckets) const {
    return s == s_ && ranks == ranks_ && buckets == buckets_;
  }

  double draw(std::uint64_t seed) const {
    const double u = static_cast<double>((seed >> 11) + 1) * 0x1p-53;
    // Uniform bucket i covers quantiles (i/b, (i+1)/b]; its Zipf twin spans
    // ranks [lo_i, hi_i]. Locate u inside that rank range by mass.
    const auto scaled = static_cast<std::uint64_t>(std::ceil(u * buckets_));
    const std::uint32_t bucket =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(buckets_, std::max<std::uint64_t>(scaled, 1)) - 1);
    std::uint32_t rank = inverse(u, lo_[bucket], hi_[bucket]);
    if (!is_inverse(u, rank)) rank = inverse(u, 1, ranks_);
    return static_cast<double>(rank) / ranks_;
  }

 private:
  // Smallest r in [first, last] with cdf(r) >= u, or last.
  std::uint32_t inverse(double u, std::uint32_t first, std::uint32_t last) const {
    auto it = std::lower_bound(cdf_.begin() + first, cdf_.begin() + last + 1, u);
    if (it == cdf_.begin() + last + 1) return last;
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

  bool is_inverse(double u, std::uint32_t r) const { return cdf_[r] >= u && cdf_[r - 1] < u; }

  double s_;
  std::uint32_t ranks_;
  std::uint32_t buckets_;
  std::vector<double> cdf_;
  std::vector<std::uint32_t> lo_;
  std::vector<std::uint32_t> hi_;
};

const ZipfSampler& zipf_sampler(const EmbeddingConfig& cfg) {
  thread_local std::optional<ZipfSampler> cached;
  if (!cached || !cached->matches(cfg.zipf_exponent, cfg.zipf_ranks, cfg.zipf_buckets))
    cached.emplace(cfg.zipf_exponent, cfg.zipf_ranks, cfg.zipf_buckets);
  return *cached;
}

void accumulate(SpanVector& y, const SpurVector& x, SpanDirection direction) {
  if (direction == SpanDirection::Add) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += x[k];
    return;
  }
  SpanVector next = y;
  for (std::size_t k = 0; k < y.size(); ++k) {
    next[k] -= x[k];
    if (next[k] < -1e-9)
      throw Error(ErrorKind::NegativeComponent,
                  "SPAN component " + std::to_string(k) + " would become " + std::to_string(next[k]));
  }
  y = next;
}

}  // namespace

double seeded_zipf_draw(std::uint64_t seed, const EmbeddingConfig& cfg) {
  if (cfg.zipf_buckets < 1 || cfg.zipf_ranks < cfg.zipf_buckets)
    throw Error(ErrorKind::InvalidConfig, "need zipf_ranks >= zipf_buckets >= 1");
  return zipf_sampler(cfg).draw(seed);
}

SpurVector spur(Label label, const EmbeddingConfig& cfg) {
  SpurVector x(cfg.d);
  for (std::size_t j = 0; j < cfg.d; ++j) {
    if (cfg.mode == EmbeddingMode::CostModel)
      x[j] = quantize_24(seeded_zipf_draw(derive_seed(SeedStream::Zipf, label, j, cfg.seed_salt), cfg));
    else
      x[j] = unit_interval_24(derive_seed(SeedStream::Spur, label, j, cfg.seed_salt));
  }
  return x;
}

BaseVector normalize_base(std::span<const double> raw) {
  double total = 0;
  for (double r : raw) total += r;
  BaseVector z(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) z[j] = raw[j] / total;
  return z;
}

BaseVector base(Label label, const EmbeddingConfig& cfg) {
  std::array<double, kMaxEmbeddingDim> raw{};
  for (std::size_t j = 0; j < cfg.dim(); ++j)
    raw[j] = unit_interval_24(derive_seed(SeedStream::Base, label, j, cfg.seed_salt));
  return normalize_base(std::span<const double>(raw.data(), cfg.dim()));
}

SpanVector span(const DynamicGraph& g, VertexId v, const EmbeddingConfig& cfg) {
  if (!g.has_vertex(v)) throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(v));
  SpanVector y(cfg.d);
  for (VertexId w : g.neighbors(v)) accumulate(y, spur(g.label(w), cfg), SpanDirection::Add);
  return y;
}

SpanVector update_span(const SpanVector& y, Label neighbor_label, SpanDirection direction,
                       const EmbeddingConfig& cfg) {
  SpanVector out = y;
  accumulate(out, spur(neighbor_label, cfg), direction);
  return out;
}

double embed_component(double raw, double z, const EmbeddingConfig& cfg) noexcept {
  if (cfg.mode == EmbeddingMode::Plain) return raw;
  const double scaled = cfg.alpha * raw;
  const double shift = cfg.beta * z;
  return scaled + shift;
}

EmbeddingVector embed(const SpurVector& x, const SpanVector& y, const BaseVector& z,
                      const EmbeddingConfig& cfg) {
  const std::size_t d = x.size();
  EmbeddingVector cat(2 * d);
  for (std::size_t k = 0; k < d; ++k) {
    cat[k] = x[k];
    cat[d + k] = y[k];
  }
  if (cfg.mode == EmbeddingMode::Plain) return cat;
  EmbeddingVector out(2 * d);
  kernels::active().affine(cat.data(), z.data(), cfg.alpha, cfg.beta, out.data(), 2 * d);
  return out;
}

EmbeddingVector embed(const SpurVector& x, const SpanVector& y, Label label,
                      const EmbeddingConfig& cfg) {
  if (cfg.mode == EmbeddingMode::Plain) return embed(x, y, BaseVector(2 * x.size()), cfg);
  return embed(x, y, base(label, cfg), cfg);
}

bool dominates(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " dimensions");
  return kernels::active().dominates(a.data(), b.data(), a.size());
}

double key(std::span<const double> a) noexcept {
  double total = 0;
  for (double v : a) total += v * v;
  return total;
}

LabelVectors label_vectors(Label label, const EmbeddingConfig& cfg) {
  LabelVectors lv;
  lv.spur = spur(label, cfg);
  lv.base = cfg.mode == EmbeddingMode::Plain ? BaseVector(cfg.dim()) : base(label, cfg);
  lv.embedded_spur = SpurVector(cfg.d);
  for (std::size_t k = 0; k < cfg.d; ++k)
    lv.embedded_spur[k] = embed_component(lv.spur[k], lv.base[k], cfg);
  return lv;
}

EmbeddingTable::EmbeddingTable(const EmbeddingConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

EmbeddingTable::EmbeddingTable(const DynamicGraph& g, const EmbeddingConfig& cfg)
    : EmbeddingTable(cfg) {
  rebuild(g);
}

LabelVectors EmbeddingTable::vectors(Label label) const {
  if (auto it = by_label_.find(label); it != by_label_.end()) return it->second;
  return label_vectors(label, cfg_);
}

const LabelVectors& EmbeddingTable::cached(Label label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end())
    throw Error(ErrorKind::InconsistentState, "label " + std::to_string(label) + " not cached");
  return it->second;
}

void EmbeddingTable::ensure_label(Label label) {
  if (!by_label_.count(label)) by_label_.emplace(label, label_vectors(label, cfg_));
}

void EmbeddingTable::ensure_vertex(const DynamicGraph& g, VertexId v) {
  if (spans_.size() < g.id_bound()) {
    spans_.resize(g.id_bound(), SpanVector(cfg_.d));
    embeddings_.resize(g.id_bound());
  }
  ensure_label(g.label(v));
}

void EmbeddingTable::refresh(const DynamicGraph& g, VertexId v) {
  const auto& lv = cached(g.label(v));
  embeddings_[v] = embed(lv.spur, spans_[v], lv.base, cfg_);
}

void EmbeddingTable::apply(const DynamicGraph& g, const UpdateEffect& effect) {
  for (VertexId v : effect.created) {
    ensure_vertex(g, v);
    spans_[v] = SpanVector(cfg_.d);
  }
  const auto dir = effect.kind == UpdateKind::Insert ? SpanDirection::Add : SpanDirection::Remove;
  const VertexId a = effect.endpoints[0].vertex;
  const VertexId b = effect.endpoints[1].vertex;
  ensure_vertex(g, a);
  ensure_vertex(g, b);
  accumulate(spans_[a], cached(g.label(b)).spur, dir);
  accumulate(spans_[b], cached(g.label(a)).spur, dir);
  refresh(g, a);
  refresh(g, b);
}

void EmbeddingTable::rebuild(const DynamicGraph& g) {
  spans_.assign(g.id_bound(), SpanVector(cfg_.d));
  embeddings_.assign(g.id_bound(), EmbeddingVector());
  for (VertexId v : g.vertices()) ensure_label(g.label(v));
  for (VertexId v : g.vertices()) {
    for (VertexId w : g.neighbors(v)) accumulate(spans_[v], cached(g.label(w)).spur, SpanDirection::Add);
    refresh(g, v);
  }
}

}  // namespace dsm
