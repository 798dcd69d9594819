#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dsm/graph_store.hpp"

namespace dsm {

enum class EmbeddingMode { Plain, BaseOptimized, CostModel };

const char* to_string(EmbeddingMode mode) noexcept;
EmbeddingMode parse_embedding_mode(std::string_view name);

inline constexpr std::size_t kMaxSpurDim = 8;
inline constexpr std::size_t kMaxEmbeddingDim = 2 * kMaxSpurDim;

struct EmbeddingConfig {
  std::size_t d = 2;
  double alpha = 0.01;
  double beta = 10.0;
  EmbeddingMode mode = EmbeddingMode::CostModel;
  double zipf_exponent = 1.2;
  std::uint32_t zipf_ranks = 1024;
  std::uint32_t zipf_buckets = 64;
  std::uint64_t seed_salt = 0;

  std::size_t dim() const noexcept { return 2 * d; }
  // InvalidConfig unless 1 <= d <= kMaxSpurDim, alpha and beta positive with
  // beta/alpha >= 10 in the base-vector modes, and ranks >= buckets >= 1.
  void validate() const;
};

// Fixed-capacity real vector; the dimensionalities here are tiny and the hot
// paths should not allocate.
template <class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(std::size_t n) : n_(n) {}
  Coords(std::initializer_list<double> init) : n_(init.size()) {
    std::size_t i = 0;
    for (double v : init) data_[i++] = v;
  }
  static Coords from(std::span<const double> src) {
    Coords c(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) c.data_[i] = src[i];
    return c;
  }

  std::size_t size() const noexcept { return n_; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> view() const noexcept { return {data_.data(), n_}; }
  const double* begin() const noexcept { return data_.data(); }
  const double* end() const noexcept { return data_.data() + n_; }

  friend bool operator==(const Coords& a, const Coords& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_; ++i)
      if (a.data_[i] != b.data_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxEmbeddingDim> data_{};
  std::size_t n_ = 0;
};

using SpurVector = Coords<struct SpurTag>;            // d components in (0, 1]
using SpanVector = Coords<struct SpanTag>;            // d non-negative components
using BaseVector = Coords<struct BaseTag>;            // 2d positive, L1 norm 1
using EmbeddingVector = Coords<struct EmbeddingTag>;  // 2d components

// SplitMix64 finalizer. Fixed constants, so every generator below is bit
// stable across runs and platforms.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Per-purpose seed for (label, component index, salt).
enum class SeedStream : std::uint64_t { Spur = 1, Base = 2, Zipf = 3 };
std::uint64_t derive_seed(SeedStream stream, Label label, std::size_t component,
                          std::uint64_t salt) noexcept;

// Uniform on (0, 1] with 24 fractional bits. Sums of such values are exact in
// double precision, which keeps incremental SPAN maintenance exact.
double unit_interval_24(std::uint64_t bits) noexcept;
double quantize_24(double v) noexcept;

// Seeded draw from Zipf(s, N) ranks via b equal-mass buckets matched between
// the uniform and the Zipf distributions; returns rank / N in (0, 1].
double seeded_zipf_draw(std::uint64_t seed, const EmbeddingConfig& cfg);

SpurVector spur(Label label, const EmbeddingConfig& cfg);
BaseVector base(Label label, const EmbeddingConfig& cfg);
BaseVector normalize_base(std::span<const double> raw);

SpanVector span(const DynamicGraph& g, VertexId v, const EmbeddingConfig& cfg);

enum class SpanDirection { Add, Remove };
// y +/- spur(neighbor_label); NegativeComponent if a removal would leave any
// component below -1e-9.
SpanVector update_span(const SpanVector& y, Label neighbor_label, SpanDirection direction,
                       const EmbeddingConfig& cfg);

// Plain: x || y. Otherwise alpha * (x || y) + beta * base(label).
EmbeddingVector embed(const SpurVector& x, const SpanVector& y, Label label,
                      const EmbeddingConfig& cfg);
EmbeddingVector embed(const SpurVector& x, const SpanVector& y, const BaseVector& z,
                      const EmbeddingConfig& cfg);

// Componentwise a <= b (equality allowed). DimensionMismatch on size mismatch.
bool dominates(const EmbeddingVector& a, const EmbeddingVector& b);

// Sum of squared components.
double key(std::span<const double> a) noexcept;
inline double key(const EmbeddingVector& a) noexcept { return key(a.view()); }

// Image of a single embedded coordinate: raw in Plain mode, otherwise
// alpha * raw + beta * z. Matches embed() bit for bit.
double embed_component(double raw, double z, const EmbeddingConfig& cfg) noexcept;

// Label-determined vectors, computed once per label.
struct LabelVectors {
  SpurVector spur;
  BaseVector base;
  // spur part of the embedding (first d coordinates)
  SpurVector embedded_spur;
};

LabelVectors label_vectors(Label label, const EmbeddingConfig& cfg);

// Maintained per-vertex SPAN vectors and embeddings for a dynamic graph.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(const EmbeddingConfig& cfg);
  EmbeddingTable(const DynamicGraph& g, const EmbeddingConfig& cfg);

  const EmbeddingConfig& config() const noexcept { return cfg_; }

  // Cached for labels seen in the graph; computed on the fly otherwise.
  LabelVectors vectors(Label label) const;
  const LabelVectors& cached(Label label) const;

  const SpanVector& span_of(VertexId v) const { return spans_[v]; }
  const EmbeddingVector& embedding_of(VertexId v) const { return embeddings_[v]; }

  // Applies the SPAN deltas of one graph update (already applied to g).
  void apply(const DynamicGraph& g, const UpdateEffect& effect);
  void rebuild(const DynamicGraph& g);

 private:
  void ensure_label(Label label);
  void ensure_vertex(const DynamicGraph& g, VertexId v);
  void refresh(const DynamicGraph& g, VertexId v);

  EmbeddingConfig cfg_;
  std::unordered_map<Label, LabelVectors> by_label_;
  std::vector<SpanVector> spans_;
  std::vector<EmbeddingVector> embeddings_;
};

}  // namespace dsm
