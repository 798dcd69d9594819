#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dsm/embedding.hpp"
#include "dsm/graph_store.hpp"

namespace dsm {

inline constexpr std::size_t kInfiniteDegree = std::numeric_limits<std::size_t>::max();

// Degree buckets (bounds[j], bounds[j+1]] for j < count(); bounds[0] = 0 and
// the last bound is kInfiniteDegree.
struct DegreeGroups {
  std::vector<std::size_t> bounds{0, kInfiniteDegree};

  std::size_t count() const noexcept { return bounds.size() - 1; }
  std::size_t lower(std::size_t j) const { return bounds[j]; }
  std::size_t upper(std::size_t j) const { return bounds[j + 1]; }
  // Group holding `degree` (>= 1).
  std::size_t group_of(std::size_t degree) const;
  // Vertex count per bucket for the given degrees (zeros ignored).
  std::vector<std::size_t> masses(std::span<const std::size_t> degrees) const;

  friend bool operator==(const DegreeGroups&, const DegreeGroups&) = default;
};

// Contiguous split of the distinct positive degrees into min(m, #distinct)
// buckets minimising the sum of squared bucket masses; ties go to the
// lexicographically smallest boundary list. Degree-0 entries are ignored.
DegreeGroups compute_degree_groups(std::span<const std::size_t> degrees, std::size_t m);
DegreeGroups compute_degree_groups(const DynamicGraph& g, std::size_t m);

// Per vertex and per SPUR dimension, the ascending neighbor SPUR components
// with prefix sums. All values are on the 2^-24 grid, so every partial sum is
// exact and incremental maintenance reproduces a rebuild bit for bit.
class SortedSpurLists {
 public:
  explicit SortedSpurLists(std::size_t d = 2) : d_(d) {}

  void build(const DynamicGraph& g, const EmbeddingTable& emb);
  void insert(VertexId v, const SpurVector& x);
  // InconsistentState if some component of x is not in v's lists.
  void remove(VertexId v, const SpurVector& x);

  std::size_t dims() const noexcept { return d_; }
  std::size_t length(VertexId v) const;
  std::span<const double> list(VertexId v, std::size_t k) const;
  // prefix(v, k)[i] = sum of the i smallest entries; size length(v) + 1.
  std::span<const double> prefix(VertexId v, std::size_t k) const;
  double sum_smallest(VertexId v, std::size_t k, std::size_t count) const;
  double sum_largest(VertexId v, std::size_t k, std::size_t count) const;

  friend bool operator==(const SortedSpurLists& a, const SortedSpurLists& b);

 private:
  struct PerVertex {
    std::vector<std::vector<double>> lists;
    std::vector<std::vector<double>> prefix;
    bool operator==(const PerVertex&) const = default;
  };
  PerVertex& slot(VertexId v);
  void rebuild_prefix(PerVertex& p, std::size_t k);

  std::size_t d_;
  std::vector<PerVertex> per_vertex_;
};

struct Mbr {
  EmbeddingVector low;
  EmbeddingVector high;
  bool contains(const EmbeddingVector& p) const;
};

// Bounds of every delta-leaf star substructure of v in embedding space. The
// first d dimensions are the center's own embedded SPUR.
Mbr mbr_for_degree(VertexId v, Label label, std::size_t delta, const SortedSpurLists& lists,
                   const EmbeddingTable& emb);

// Uniform grid over [0, extent] per dimension. Interval i covers
// (upper[i-1], upper[i]]; the last one is open-ended, so points past the
// extent stay inside a cell whose bound really covers them.
struct GridDomain {
  std::size_t cells_per_dim = 5;
  std::size_t dim = 4;
  double extent = 1;
  std::vector<double> upper;  // cells_per_dim - 1 finite bounds

  static GridDomain make(std::size_t cells_per_dim, std::size_t dim, double extent);
  std::size_t interval_of(double x) const;
  double interval_upper(std::size_t i) const;
  bool operator==(const GridDomain&) const = default;
};

// Extent from the initial graph: beta(1 + eps) + alpha * max SPAN component
// (plain mode: (1 + eps) * max(1, max SPAN component)).
GridDomain make_grid_domain(const DynamicGraph& g0, const EmbeddingTable& emb,
                            std::size_t cells_per_dim, double eps = 0.01);

struct VertexEntry {
  VertexId vertex = 0;
  std::size_t group = 0;
  std::size_t ub_delta = 0;
  EmbeddingVector ub_corner;
  bool operator==(const VertexEntry&) const = default;
};

struct Cell {
  std::uint64_t id = 0;
  std::vector<std::uint32_t> coords;
  EmbeddingVector ub;
  double key = 0;
  // Parallel arrays sorted by vertex id; corners row-major, dim wide.
  std::vector<VertexId> members;
  std::vector<Label> labels;
  std::vector<double> corners;

  bool operator==(const Cell&) const = default;
};

class GridSynopsis {
 public:
  GridSynopsis() = default;
  GridSynopsis(std::size_t group, GridDomain domain) : group_(group), domain_(std::move(domain)) {}

  std::size_t group() const noexcept { return group_; }
  std::size_t entry_count() const noexcept { return entry_count_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  void insert(const VertexEntry& e, Label label);
  // InconsistentState if v has no entry here.
  void remove(VertexId v);
  const VertexEntry* entry(VertexId v) const;

  // Cells by key descending, then id ascending.
  template <class F>
  void for_each_cell(F&& f) const {
    for (const auto& [neg_key, id] : order_) {
      if (!f(cells_.at(id))) return;
    }
  }

  friend bool operator==(const GridSynopsis& a, const GridSynopsis& b);

 private:
  std::uint64_t cell_id(const EmbeddingVector& p, std::vector<std::uint32_t>& coords) const;

  std::size_t group_ = 0;
  GridDomain domain_;
  std::map<std::uint64_t, Cell> cells_;
  std::set<std::pair<double, std::uint64_t>> order_;  // (-key, id)
  std::vector<VertexEntry> entries_;                  // indexed by vertex; ub_delta 0 = absent
  std::vector<std::uint64_t> cell_of_;
  std::size_t entry_count_ = 0;
};

struct ScanStats {
  std::size_t cells_visited = 0;     // passed the key cutoff
  std::size_t cells_pruned = 0;      // q does not dominate the cell's UB corner
  std::size_t entries_examined = 0;  // entries of cells past the cutoff
  std::size_t dominance_pass = 0;    // q dominates the entry's UB corner
  std::size_t label_pass = 0;        // ... and labels agree
  std::size_t survivors = 0;         // ... and q lies in MBR_deg(q)

  ScanStats& operator+=(const ScanStats& o);
  // 1 - survivors / examined; 0 when nothing was examined.
  double pruning_power() const;
};

struct ScanResult {
  std::vector<VertexId> candidates;  // ascending
  ScanStats stats;
};

struct ScanOptions {
  bool use_mbr = true;
};

struct SynopsisConfig {
  std::size_t groups = 3;
  std::size_t cells_per_dim = 5;
};

// All m synopses plus the sorted lists they read from.
class SynopsisIndex {
 public:
  SynopsisIndex() = default;
  // Groups and grid extent are derived from g0 and then frozen.
  SynopsisIndex(const DynamicGraph& g0, const EmbeddingTable& emb, const SynopsisConfig& cfg);
  SynopsisIndex(const DynamicGraph& g, const EmbeddingTable& emb, DegreeGroups groups,
                GridDomain domain);

  const DegreeGroups& groups() const noexcept { return groups_; }
  const GridDomain& domain() const noexcept { return domain_; }
  const SortedSpurLists& lists() const noexcept { return lists_; }
  const GridSynopsis& synopsis(std::size_t j) const { return synopses_[j]; }
  std::size_t total_entries() const;

  // emb must already reflect the update.
  void maintain(const DynamicGraph& g, const EmbeddingTable& emb, const UpdateEffect& effect);

  ScanResult scan(const EmbeddingVector& q, std::size_t q_degree, Label q_label,
                  const EmbeddingTable& emb, ScanOptions opts = {}) const;
  // Same predicate as scan() for a single vertex.
  bool admits(VertexId v, Label v_label, const EmbeddingVector& q, std::size_t q_degree,
              Label q_label, const EmbeddingTable& emb, ScanOptions opts = {}) const;
  Mbr mbr(VertexId v, Label label, std::size_t delta, const EmbeddingTable& emb) const {
    return mbr_for_degree(v, label, delta, lists_, emb);
  }

  // `cell <coords> key=<v> entries=<n>` per cell, synopses in group order.
  void dump(std::ostream& out) const;

  friend bool operator==(const SynopsisIndex& a, const SynopsisIndex& b);

 private:
  void build(const DynamicGraph& g, const EmbeddingTable& emb);
  void relocate(VertexId v, Label label, std::size_t old_degree, std::size_t new_degree,
                const EmbeddingTable& emb);
  VertexEntry make_entry(VertexId v, Label label, std::size_t group, std::size_t degree,
                         const EmbeddingTable& emb) const;

  DegreeGroups groups_;
  GridDomain domain_;
  SortedSpurLists lists_;
  std::vector<GridSynopsis> synopses_;
};

SynopsisIndex build_synopses(const DynamicGraph& g, const EmbeddingTable& emb,
                             const DegreeGroups& groups, const GridDomain& domain);

}  // namespace dsm
