#include "dsm/graph_store.hpp"

#include <algorithm>

#include "dsm/error.hpp"

namespace dsm {

namespace {

std::string vertex_name(VertexId v) { return "vertex " + std::to_string(v); }

std::string edge_name(VertexId u, VertexId v) {
  return "edge (" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

}  // namespace

Label DynamicGraph::label(VertexId v) const {
  if (!has_vertex(v)) throw Error(ErrorKind::UnknownVertex, vertex_name(v));
  return labels_[v];
}

std::span<const VertexId> DynamicGraph::neighbors(VertexId v) const {
  if (!has_vertex(v)) throw Error(ErrorKind::UnknownVertex, vertex_name(v));
  return adj_[v];
}

bool DynamicGraph::has_edge(VertexId u, VertexId v) const noexcept {
  if (!has_vertex(u) || !has_vertex(v)) return false;
  const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
  const VertexId other = adj_[u].size() <= adj_[v].size() ? v : u;
  return std::binary_search(a.begin(), a.end(), other);
}

std::size_t DynamicGraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& a : adj_) best = std::max(best, a.size());
  return best;
}

std::vector<VertexId> DynamicGraph::vertices() const {
  std::vector<VertexId> out;
  out.reserve(vertex_count_);
  for (VertexId v = 0; v < labels_.size(); ++v)
    if (labels_[v] != kNoLabel) out.push_back(v);
  return out;
}

std::vector<std::pair<VertexId, VertexId>> DynamicGraph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count_);
  for (VertexId u = 0; u < adj_.size(); ++u)
    for (VertexId v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

void DynamicGraph::ensure_slot(VertexId v) {
  if (v >= labels_.size()) {
    labels_.resize(static_cast<std::size_t>(v) + 1, kNoLabel);
    adj_.resize(static_cast<std::size_t>(v) + 1);
  }
}

void DynamicGraph::add_vertex(VertexId v, Label label) {
  if (label == kNoLabel) throw Error(ErrorKind::InvalidParams, "label value reserved");
  if (has_vertex(v)) {
    if (labels_[v] != label)
      throw Error(ErrorKind::LabelConflict, vertex_name(v) + " already has label " +
                                                std::to_string(labels_[v]));
    return;
  }
  ensure_slot(v);
  labels_[v] = label;
  ++vertex_count_;
}

void DynamicGraph::link(VertexId u, VertexId v) {
  auto& a = adj_[u];
  a.insert(std::lower_bound(a.begin(), a.end(), v), v);
}

void DynamicGraph::unlink(VertexId u, VertexId v) {
  auto& a = adj_[u];
  a.erase(std::lower_bound(a.begin(), a.end(), v));
}

void DynamicGraph::add_edge(VertexId u, VertexId v) {
  if (u == v) throw Error(ErrorKind::SelfLoop, vertex_name(u));
  if (!has_vertex(u)) throw Error(ErrorKind::UndeclaredVertex, vertex_name(u));
  if (!has_vertex(v)) throw Error(ErrorKind::UndeclaredVertex, vertex_name(v));
  if (has_edge(u, v)) throw Error(ErrorKind::DuplicateEdge, edge_name(u, v));
  link(u, v);
  link(v, u);
  ++edge_count_;
}

UpdateEffect DynamicGraph::apply(const UpdateOp& op) {
  if (op.u == op.v) throw Error(ErrorKind::SelfLoop, vertex_name(op.u));
  UpdateEffect effect;
  effect.kind = op.kind;

  if (op.kind == UpdateKind::Insert) {
    // Validate everything before mutating so a failed op leaves no trace.
    const std::pair<VertexId, const std::optional<Label>*> ends[2] = {{op.u, &op.label_u},
                                                                      {op.v, &op.label_v}};
    for (const auto& [w, lbl] : ends) {
      if (has_vertex(w)) {
        if (lbl->has_value() && **lbl != labels_[w])
          throw Error(ErrorKind::LabelConflict, vertex_name(w) + " already has label " +
                                                    std::to_string(labels_[w]));
      } else if (!lbl->has_value()) {
        throw Error(ErrorKind::MissingLabel, "new " + vertex_name(w) + " arrives without a label");
      } else if (**lbl == kNoLabel) {
        throw Error(ErrorKind::InvalidParams, "label value reserved");
      }
    }
    if (has_edge(op.u, op.v)) throw Error(ErrorKind::DuplicateEdge, edge_name(op.u, op.v));
    for (const auto& [w, lbl] : ends) {
      if (!has_vertex(w)) {
        add_vertex(w, **lbl);
        effect.created.push_back(w);
      }
    }
    const std::size_t du = adj_[op.u].size();
    const std::size_t dv = adj_[op.v].size();
    link(op.u, op.v);
    link(op.v, op.u);
    ++edge_count_;
    effect.endpoints = {DegreeChange{op.u, du, du + 1}, DegreeChange{op.v, dv, dv + 1}};
  } else {
    if (!has_edge(op.u, op.v)) throw Error(ErrorKind::MissingEdge, edge_name(op.u, op.v));
    const std::size_t du = adj_[op.u].size();
    const std::size_t dv = adj_[op.v].size();
    unlink(op.u, op.v);
    unlink(op.v, op.u);
    --edge_count_;
    effect.endpoints = {DegreeChange{op.u, du, du - 1}, DegreeChange{op.v, dv, dv - 1}};
    for (const auto& c : effect.endpoints)
      if (c.new_degree == 0) effect.isolated.push_back(c.vertex);
  }
  effect.timestamp = ++timestamp_;
  return effect;
}

UpdateEffect apply_update(DynamicGraph& g, const UpdateOp& op) { return g.apply(op); }

}  // namespace dsm
