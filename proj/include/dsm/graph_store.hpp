#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dsm {

using VertexId = std::uint32_t;
using Label = std::uint32_t;

enum class UpdateKind { Insert, Delete };

// Undirected edge key with the smaller endpoint in the high word.
using EdgeKey = std::uint64_t;

inline EdgeKey edge_key(VertexId a, VertexId b) noexcept {
  if (a > b) std::swap(a, b);
  return (static_cast<EdgeKey>(a) << 32) | b;
}

struct UpdateOp {
  UpdateKind kind = UpdateKind::Insert;
  VertexId u = 0;
  VertexId v = 0;
  std::optional<Label> label_u;
  std::optional<Label> label_v;
  std::int64_t timestamp = 0;

  static UpdateOp insert(VertexId u, VertexId v, std::optional<Label> lu = {},
                         std::optional<Label> lv = {}) {
    return {UpdateKind::Insert, u, v, lu, lv, 0};
  }
  static UpdateOp erase(VertexId u, VertexId v) { return {UpdateKind::Delete, u, v, {}, {}, 0}; }
};

struct DegreeChange {
  VertexId vertex = 0;
  std::size_t old_degree = 0;
  std::size_t new_degree = 0;
};

struct UpdateEffect {
  UpdateKind kind = UpdateKind::Insert;
  std::array<DegreeChange, 2> endpoints{};
  std::vector<VertexId> created;
  std::vector<VertexId> isolated;
  std::int64_t timestamp = 0;
};

// Mutable undirected vertex-labeled graph. Adjacency lists are kept sorted,
// so the neighbor set is ordered and duplicate-free. Vertices are never
// removed; a vertex whose degree drops to zero keeps its label.
class DynamicGraph {
 public:
  DynamicGraph() = default;

  bool has_vertex(VertexId v) const noexcept {
    return v < labels_.size() && labels_[v] != kNoLabel;
  }
  Label label(VertexId v) const;
  std::span<const VertexId> neighbors(VertexId v) const;
  std::size_t degree(VertexId v) const { return neighbors(v).size(); }
  bool has_edge(VertexId u, VertexId v) const noexcept;

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::int64_t timestamp() const noexcept { return timestamp_; }
  // Exclusive upper bound on vertex ids; sized for id-indexed side tables.
  VertexId id_bound() const noexcept { return static_cast<VertexId>(labels_.size()); }
  std::size_t max_degree() const noexcept;

  std::vector<VertexId> vertices() const;
  // Each undirected edge once, as (smaller, larger), in ascending order.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  // Registers v; re-adding with the same label is a no-op, a different label
  // raises LabelConflict.
  void add_vertex(VertexId v, Label label);
  // Static construction helper: errors as for an Insert, both endpoints must exist.
  void add_edge(VertexId u, VertexId v);

  UpdateEffect apply(const UpdateOp& op);

  friend bool operator==(const DynamicGraph& a, const DynamicGraph& b) {
    return a.labels_ == b.labels_ && a.adj_ == b.adj_;
  }

 private:
  static constexpr Label kNoLabel = std::numeric_limits<Label>::max();

  void ensure_slot(VertexId v);
  void link(VertexId u, VertexId v);
  void unlink(VertexId u, VertexId v);

  std::vector<Label> labels_;
  std::vector<std::vector<VertexId>> adj_;
  std::size_t vertex_count_ = 0;
  std::size_t edge_count_ = 0;
  std::int64_t timestamp_ = 0;
};

UpdateEffect apply_update(DynamicGraph& g, const UpdateOp& op);

// Text formats.
//   graph:  optional `t <n> <m>`, then `v <id> <label>` and `e <u> <v>`; `#` comments
//   stream: `+ <u> <v> [<label_u> <label_v>]` and `- <u> <v>`
DynamicGraph load_graph(std::istream& in);
DynamicGraph load_graph_file(const std::string& path);
// A file holding several graphs, each introduced by its own `t` line.
std::vector<DynamicGraph> load_graphs(std::istream& in);
std::vector<DynamicGraph> load_graphs_file(const std::string& path);
void write_graph(std::ostream& out, const DynamicGraph& g);

std::vector<UpdateOp> load_stream(std::istream& in);
std::vector<UpdateOp> load_stream_file(const std::string& path);
void write_stream(std::ostream& out, std::span<const UpdateOp> ops);

}  // namespace dsm
