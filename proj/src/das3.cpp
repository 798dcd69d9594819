#include "dsm/das3.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dsm/error.hpp"
#include "dsm/kernels.hpp"

namespace dsm {

// ---- degree groups ---------------------------------------------------------

std::size_t DegreeGroups::group_of(std::size_t degree) const {
  auto it = std::lower_bound(bounds.begin() + 1, bounds.end(), degree);
  return static_cast<std::size_t>(it - (bounds.begin() + 1));
}

std::vector<std::size_t> DegreeGroups::masses(std::span<const std::size_t> degrees) const {
  std::vector<std::size_t> out(count(), 0);
  for (std::size_t deg : degrees)
    if (deg > 0) ++out[group_of(deg)];
  return out;
}

DegreeGroups compute_degree_groups(std::span<const std::size_t> degrees, std::size_t m) {
  if (m == 0) throw Error(ErrorKind::InvalidConfig, "need at least one degree group");
  std::map<std::size_t, std::uint64_t> freq;
  for (std::size_t deg : degrees)
    if (deg > 0) ++freq[deg];
  const std::size_t k = freq.size();
  const std::size_t r = std::min(m, k);
  DegreeGroups out;
  if (r <= 1) return out;

  std::vector<std::size_t> value;
  std::vector<std::uint64_t> prefix{0};
  for (auto [deg, n] : freq) {
    value.push_back(deg);
    prefix.push_back(prefix.back() + n);
  }
  auto cost = [&](std::size_t i, std::size_t e) {
    const std::uint64_t mass = prefix[e + 1] - prefix[i];
    return mass * mass;
  };
  // best[g][i]: cheapest split of distinct degrees i..k-1 into g buckets.
  constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::vector<std::uint64_t>> best(r + 1, std::vector<std::uint64_t>(k + 1, kNone));
  best[0][k] = 0;
  for (std::size_t g = 1; g <= r; ++g)
    for (std::size_t i = 0; i + g <= k; ++i)
      for (std::size_t e = i; e + g <= k; ++e) {
        if (best[g - 1][e + 1] == kNone) continue;
        best[g][i] = std::min(best[g][i], cost(i, e) + best[g - 1][e + 1]);
      }

  out.bounds = {0};
  std::size_t i = 0;
  for (std::size_t g = r; g > 1; --g) {
    for (std::size_t e = i; e + g <= k; ++e) {
      if (best[g - 1][e + 1] != kNone && cost(i, e) + best[g - 1][e + 1] == best[g][i]) {
        out.bounds.push_back(value[e]);
        i = e + 1;
        break;
      }
    }
  }
  out.bounds.push_back(kInfiniteDegree);
  return out;
}

DegreeGroups compute_degree_groups(const DynamicGraph& g, std::size_t m) {
  std::vector<std::size_t> degrees;
  for (VertexId v : g.vertices()) degrees.push_back(g.degree(v));
  return compute_degree_groups(degrees, m);
}

// ---- sorted SPUR lists -----------------------------------------------------

namespace {
const double kZeroPrefix[1] = {0.0};
}

SortedSpurLists::PerVertex& SortedSpurLists::slot(VertexId v) {
  if (per_vertex_.size() <= v) per_vertex_.resize(std::size_t{v} + 1);
  auto& p = per_vertex_[v];
  if (p.lists.empty()) {
    p.lists.assign(d_, {});
    p.prefix.assign(d_, std::vector<double>{0.0});
  }
  return p;
}

void SortedSpurLists::rebuild_prefix(PerVertex& p, std::size_t k) {
  auto& pre = p.prefix[k];
  const auto& list = p.lists[k];
  pre.resize(list.size() + 1);
  pre[0] = 0;
  for (std::size_t i = 0; i < list.size(); ++i) pre[i + 1] = pre[i] + list[i];
}

void SortedSpurLists::build(const DynamicGraph& g, const EmbeddingTable& emb) {
  per_vertex_.clear();
  for (VertexId v : g.vertices()) {
    if (g.degree(v) == 0) continue;
    auto& p = slot(v);
    for (VertexId w : g.neighbors(v)) {
      const auto& x = emb.cached(g.label(w)).spur;
      for (std::size_t k = 0; k < d_; ++k) p.lists[k].push_back(x[k]);
    }
    for (std::size_t k = 0; k < d_; ++k) {
      std::sort(p.lists[k].begin(), p.lists[k].end());
      rebuild_prefix(p, k);
    }
  }
}

void SortedSpurLists::insert(VertexId v, const SpurVector& x) {
  auto& p = slot(v);
  for (std::size_t k = 0; k < d_; ++k) {
    auto& list = p.lists[k];
    list.insert(std::upper_bound(list.begin(), list.end(), x[k]), x[k]);
    rebuild_prefix(p, k);
  }
}

void SortedSpurLists::remove(VertexId v, const SpurVector& x) {
  if (length(v) == 0)
    throw Error(ErrorKind::InconsistentState, "no SPUR list entries for vertex " + std::to_string(v));
  auto& p = per_vertex_[v];
  for (std::size_t k = 0; k < d_; ++k) {
    auto it = std::lower_bound(p.lists[k].begin(), p.lists[k].end(), x[k]);
    if (it == p.lists[k].end() || *it != x[k])
      throw Error(ErrorKind::InconsistentState,
                  "SPUR component missing from list " + std::to_string(k) + " of vertex " +
                      std::to_string(v));
  }
  for (std::size_t k = 0; k < d_; ++k) {
    auto& list = p.lists[k];
    list.erase(std::lower_bound(list.begin(), list.end(), x[k]));
    rebuild_prefix(p, k);
  }
}

std::size_t SortedSpurLists::length(VertexId v) const {
  if (v >= per_vertex_.size() || per_vertex_[v].lists.empty()) return 0;
  return per_vertex_[v].lists[0].size();
}

std::span<const double> SortedSpurLists::list(VertexId v, std::size_t k) const {
  if (length(v) == 0) return {};
  return per_vertex_[v].lists[k];
}

std::span<const double> SortedSpurLists::prefix(VertexId v, std::size_t k) const {
  if (length(v) == 0) return {kZeroPrefix, 1};
  return per_vertex_[v].prefix[k];
}

double SortedSpurLists::sum_smallest(VertexId v, std::size_t k, std::size_t count) const {
  return prefix(v, k)[count];
}

double SortedSpurLists::sum_largest(VertexId v, std::size_t k, std::size_t count) const {
  const auto pre = prefix(v, k);
  const std::size_t n = pre.size() - 1;
  return pre[n] - pre[n - count];
}

bool operator==(const SortedSpurLists& a, const SortedSpurLists& b) {
  if (a.d_ != b.d_) return false;
  const std::size_t n = std::max(a.per_vertex_.size(), b.per_vertex_.size());
  for (VertexId v = 0; v < n; ++v) {
    const std::size_t len = a.length(v);
    if (len != b.length(v)) return false;
    if (len == 0) continue;
    if (!(a.per_vertex_[v] == b.per_vertex_[v])) return false;
  }
  return true;
}

// ---- MBR -------------------------------------------------------------------

bool Mbr::contains(const EmbeddingVector& p) const {
  if (p.size() != low.size())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(p.size()) + " vs " + std::to_string(low.size()) + " dimensions");
  return kernels::active().in_box(p.data(), low.data(), high.data(), p.size());
}

Mbr mbr_for_degree(VertexId v, Label label, std::size_t delta, const SortedSpurLists& lists,
                   const EmbeddingTable& emb) {
  const std::size_t deg = lists.length(v);
  if (delta < 1 || delta > deg)
    throw Error(ErrorKind::DegreeOutOfRange, "delta " + std::to_string(delta) + " for vertex " +
                                                 std::to_string(v) + " of degree " +
                                                 std::to_string(deg));
  const auto& cfg = emb.config();
  const auto& lv = emb.cached(label);
  const std::size_t d = cfg.d;
  Mbr box{EmbeddingVector(2 * d), EmbeddingVector(2 * d)};
  for (std::size_t k = 0; k < d; ++k) {
    box.low[k] = box.high[k] = lv.embedded_spur[k];
    box.low[d + k] = embed_component(lists.sum_smallest(v, k, delta), lv.base[d + k], cfg);
    box.high[d + k] = embed_component(lists.sum_largest(v, k, delta), lv.base[d + k], cfg);
  }
  return box;
}

// ---- grid ------------------------------------------------------------------

GridDomain GridDomain::make(std::size_t cells_per_dim, std::size_t dim, double extent) {
  if (cells_per_dim == 0) throw Error(ErrorKind::InvalidConfig, "K must be positive");
  if (!(extent > 0)) throw Error(ErrorKind::InvalidConfig, "grid extent must be positive");
  long double cells = 1;
  for (std::size_t j = 0; j < dim; ++j) cells *= static_cast<long double>(cells_per_dim);
  if (cells > static_cast<long double>(std::numeric_limits<std::uint64_t>::max()))
    throw Error(ErrorKind::InvalidConfig, "K^dim cell ids overflow 64 bits");
  GridDomain g;
  g.cells_per_dim = cells_per_dim;
  g.dim = dim;
  g.extent = extent;
  for (std::size_t i = 0; i + 1 < cells_per_dim; ++i)
    g.upper.push_back(static_cast<double>(i + 1) * extent / static_cast<double>(cells_per_dim));
  return g;
}

std::size_t GridDomain::interval_of(double x) const {
  return static_cast<std::size_t>(std::lower_bound(upper.begin(), upper.end(), x) - upper.begin());
}

double GridDomain::interval_upper(std::size_t i) const {
  return i < upper.size() ? upper[i] : std::numeric_limits<double>::infinity();
}

GridDomain make_grid_domain(const DynamicGraph& g0, const EmbeddingTable& emb,
                            std::size_t cells_per_dim, double eps) {
  const auto& cfg = emb.config();
  double max_span = 0;
  for (VertexId v : g0.vertices())
    for (double c : emb.span_of(v).view()) max_span = std::max(max_span, c);
  const double extent = cfg.mode == EmbeddingMode::Plain
                            ? (1 + eps) * std::max(1.0, max_span)
                            : cfg.beta * (1 + eps) + cfg.alpha * max_span;
  return GridDomain::make(cells_per_dim, cfg.dim(), extent);
}

std::uint64_t GridSynopsis::cell_id(const EmbeddingVector& p,
                                    std::vector<std::uint32_t>& coords) const {
  coords.resize(domain_.dim);
  std::uint64_t id = 0;
  std::uint64_t radix = 1;
  for (std::size_t j = 0; j < domain_.dim; ++j) {
    coords[j] = static_cast<std::uint32_t>(domain_.interval_of(p[j]));
    id += coords[j] * radix;
    radix *= domain_.cells_per_dim;
  }
  return id;
}

void GridSynopsis::insert(const VertexEntry& e, Label label) {
  if (e.ub_corner.size() != domain_.dim)
    throw Error(ErrorKind::DimensionMismatch, "entry corner does not match the grid");
  if (entry(e.vertex))
    throw Error(ErrorKind::InconsistentState,
                "vertex " + std::to_string(e.vertex) + " already in synopsis " + std::to_string(group_));
  std::vector<std::uint32_t> coords;
  const std::uint64_t id = cell_id(e.ub_corner, coords);
  auto [it, fresh] = cells_.try_emplace(id);
  Cell& c = it->second;
  if (fresh) {
    c.id = id;
    c.coords = coords;
    c.ub = EmbeddingVector(domain_.dim);
    for (std::size_t j = 0; j < domain_.dim; ++j) c.ub[j] = domain_.interval_upper(coords[j]);
    c.key = key(c.ub);
    order_.emplace(-c.key, id);
  }
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(c.members.begin(), c.members.end(), e.vertex) - c.members.begin());
  c.members.insert(c.members.begin() + pos, e.vertex);
  c.labels.insert(c.labels.begin() + pos, label);
  c.corners.insert(c.corners.begin() + pos * domain_.dim, e.ub_corner.begin(), e.ub_corner.end());

  if (entries_.size() <= e.vertex) {
    entries_.resize(std::size_t{e.vertex} + 1);
    cell_of_.resize(std::size_t{e.vertex} + 1);
  }
  entries_[e.vertex] = e;
  cell_of_[e.vertex] = id;
  ++entry_count_;
}

void GridSynopsis::remove(VertexId v) {
  if (!entry(v))
    throw Error(ErrorKind::InconsistentState,
                "vertex " + std::to_string(v) + " missing from synopsis " + std::to_string(group_));
  auto it = cells_.find(cell_of_[v]);
  if (it == cells_.end()) throw Error(ErrorKind::InconsistentState, "entry points at a missing cell");
  Cell& c = it->second;
  auto m = std::lower_bound(c.members.begin(), c.members.end(), v);
  if (m == c.members.end() || *m != v)
    throw Error(ErrorKind::InconsistentState, "cell does not list vertex " + std::to_string(v));
  const auto pos = static_cast<std::size_t>(m - c.members.begin());
  c.members.erase(m);
  c.labels.erase(c.labels.begin() + pos);
  c.corners.erase(c.corners.begin() + pos * domain_.dim,
                  c.corners.begin() + (pos + 1) * domain_.dim);
  if (c.members.empty()) {
    order_.erase({-c.key, c.id});
    cells_.erase(it);
  }
  entries_[v] = VertexEntry{};
  --entry_count_;
}

const VertexEntry* GridSynopsis::entry(VertexId v) const {
  if (v >= entries_.size() || entries_[v].ub_delta == 0) return nullptr;
  return &entries_[v];
}

bool operator==(const GridSynopsis& a, const GridSynopsis& b) {
  if (a.group_ != b.group_ || !(a.domain_ == b.domain_) || a.entry_count_ != b.entry_count_ ||
      a.cells_ != b.cells_ || a.order_ != b.order_)
    return false;
  const std::size_t n = std::max(a.entries_.size(), b.entries_.size());
  for (VertexId v = 0; v < n; ++v) {
    const VertexEntry* x = a.entry(v);
    const VertexEntry* y = b.entry(v);
    if (!x != !y) return false;
    if (x && !(*x == *y)) return false;
  }
  return true;
}

// ---- scan statistics -------------------------------------------------------

ScanStats& ScanStats::operator+=(const ScanStats& o) {
  cells_visited += o.cells_visited;
  cells_pruned += o.cells_pruned;
  entries_examined += o.entries_examined;
  dominance_pass += o.dominance_pass;
  label_pass += o.label_pass;
  survivors += o.survivors;
  return *this;
}

double ScanStats::pruning_power() const {
  if (entries_examined == 0) return 0;
  return 1.0 - static_cast<double>(survivors) / static_cast<double>(entries_examined);
}

// ---- index -----------------------------------------------------------------

SynopsisIndex::SynopsisIndex(const DynamicGraph& g0, const EmbeddingTable& emb,
                             const SynopsisConfig& cfg)
    : SynopsisIndex(g0, emb, compute_degree_groups(g0, cfg.groups),
                    make_grid_domain(g0, emb, cfg.cells_per_dim)) {}

SynopsisIndex::SynopsisIndex(const DynamicGraph& g, const EmbeddingTable& emb,
                             DegreeGroups groups, GridDomain domain)
    : groups_(std::move(groups)), domain_(std::move(domain)), lists_(emb.config().d) {
  if (domain_.dim != emb.config().dim())
    throw Error(ErrorKind::DimensionMismatch, "grid dimension differs from the embedding");
  build(g, emb);
}

SynopsisIndex build_synopses(const DynamicGraph& g, const EmbeddingTable& emb,
                             const DegreeGroups& groups, const GridDomain& domain) {
  return SynopsisIndex(g, emb, groups, domain);
}

std::size_t SynopsisIndex::total_entries() const {
  std::size_t n = 0;
  for (const auto& s : synopses_) n += s.entry_count();
  return n;
}

VertexEntry SynopsisIndex::make_entry(VertexId v, Label label, std::size_t group,
                                      std::size_t degree, const EmbeddingTable& emb) const {
  const auto& cfg = emb.config();
  const auto& lv = emb.cached(label);
  VertexEntry e;
  e.vertex = v;
  e.group = group;
  e.ub_delta = std::min(degree, groups_.upper(group));
  e.ub_corner = EmbeddingVector(cfg.dim());
  for (std::size_t k = 0; k < cfg.d; ++k) {
    e.ub_corner[k] = lv.embedded_spur[k];
    e.ub_corner[cfg.d + k] =
        embed_component(lists_.sum_largest(v, k, e.ub_delta), lv.base[cfg.d + k], cfg);
  }
  return e;
}

void SynopsisIndex::build(const DynamicGraph& g, const EmbeddingTable& emb) {
  lists_ = SortedSpurLists(emb.config().d);
  lists_.build(g, emb);
  synopses_.clear();
  for (std::size_t j = 0; j < groups_.count(); ++j) synopses_.emplace_back(j, domain_);
  for (VertexId v : g.vertices()) relocate(v, g.label(v), 0, g.degree(v), emb);
}

void SynopsisIndex::relocate(VertexId v, Label label, std::size_t old_degree,
                             std::size_t new_degree, const EmbeddingTable& emb) {
  for (std::size_t j = 0; j < groups_.count(); ++j) {
    const std::size_t lo = groups_.lower(j);
    if (old_degree > lo) synopses_[j].remove(v);
    if (new_degree > lo) synopses_[j].insert(make_entry(v, label, j, new_degree, emb), label);
  }
}

void SynopsisIndex::maintain(const DynamicGraph& g, const EmbeddingTable& emb,
                             const UpdateEffect& effect) {
  const VertexId a = effect.endpoints[0].vertex;
  const VertexId b = effect.endpoints[1].vertex;
  const Label la = g.label(a);
  const Label lb = g.label(b);
  if (effect.kind == UpdateKind::Insert) {
    lists_.insert(a, emb.cached(lb).spur);
    lists_.insert(b, emb.cached(la).spur);
  } else {
    lists_.remove(a, emb.cached(lb).spur);
    lists_.remove(b, emb.cached(la).spur);
  }
  for (const auto& change : effect.endpoints) {
    if (lists_.length(change.vertex) != change.new_degree)
      throw Error(ErrorKind::InconsistentState,
                  "SPUR lists of vertex " + std::to_string(change.vertex) + " disagree with its degree");
    relocate(change.vertex, g.label(change.vertex), change.old_degree, change.new_degree, emb);
  }
}

ScanResult SynopsisIndex::scan(const EmbeddingVector& q, std::size_t q_degree, Label q_label,
                               const EmbeddingTable& emb, ScanOptions opts) const {
  if (q.size() != domain_.dim)
    throw Error(ErrorKind::DimensionMismatch, "query embedding does not match the grid");
  ScanResult out;
  if (q_degree == 0) return out;
  const auto& kern = kernels::active();
  const GridSynopsis& syn = synopses_[groups_.group_of(q_degree)];
  const double kq = key(q);
  const std::size_t dim = domain_.dim;
  std::vector<std::uint32_t> hits;
  syn.for_each_cell([&](const Cell& c) {
    if (c.key < kq) return false;
    auto& st = out.stats;
    ++st.cells_visited;
    st.entries_examined += c.members.size();
    if (!kern.dominates(q.data(), c.ub.data(), dim)) {
      ++st.cells_pruned;
      return true;
    }
    hits.resize(c.members.size());
    const std::size_t n = kern.dominated_rows(q.data(), c.corners.data(), c.members.size(), dim, hits.data());
    st.dominance_pass += n;
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t i = hits[h];
      if (c.labels[i] != q_label) continue;
      ++st.label_pass;
      const VertexId v = c.members[i];
      if (opts.use_mbr) {
        if (lists_.length(v) < q_degree) continue;
        if (!mbr(v, c.labels[i], q_degree, emb).contains(q)) continue;
      }
      ++st.survivors;
      out.candidates.push_back(v);
    }
    return true;
  });
  std::sort(out.candidates.begin(), out.candidates.end());
  return out;
}

bool SynopsisIndex::admits(VertexId v, Label v_label, const EmbeddingVector& q,
                           std::size_t q_degree, Label q_label, const EmbeddingTable& emb,
                           ScanOptions opts) const {
  if (v_label != q_label || q_degree == 0) return false;
  const VertexEntry* e = synopses_[groups_.group_of(q_degree)].entry(v);
  if (!e) return false;
  if (!kernels::active().dominates(q.data(), e->ub_corner.data(), q.size())) return false;
  if (!opts.use_mbr) return true;
  return lists_.length(v) >= q_degree && mbr(v, v_label, q_degree, emb).contains(q);
}

void SynopsisIndex::dump(std::ostream& out) const {
  std::ostringstream line;
  line << std::setprecision(10);
  for (const auto& syn : synopses_) {
    const std::size_t j = syn.group();
    line.str("");
    line << "# synopsis " << j << " degrees (" << groups_.lower(j) << ",";
    if (groups_.upper(j) == kInfiniteDegree)
      line << "inf";
    else
      line << groups_.upper(j);
    line << "] entries=" << syn.entry_count() << '\n';
    out << line.str();
    syn.for_each_cell([&](const Cell& c) {
      line.str("");
      line << "cell ";
      for (std::size_t i = 0; i < c.coords.size(); ++i) line << (i ? "," : "") << c.coords[i];
      line << " key=" << c.key << " entries=" << c.members.size() << '\n';
      out << line.str();
      return true;
    });
  }
}

bool operator==(const SynopsisIndex& a, const SynopsisIndex& b) {
  return a.groups_ == b.groups_ && a.domain_ == b.domain_ && a.lists_ == b.lists_ &&
         a.synopses_ == b.synopses_;
}

}  // namespace dsm
