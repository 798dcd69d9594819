#include <algorithm>

#include "dsm/oracle.hpp"

namespace dsm::oracle {

namespace {

// Binding order: start at id 0, then repeatedly the smallest unbound id that
// touches the bound set.
std::vector<QueryVertex> id_order(const QueryGraph& q) {
  std::vector<QueryVertex> order{0};
  std::vector<bool> bound(q.size(), false);
  bound[0] = true;
  while (order.size() < q.size()) {
    for (QueryVertex c = 0; c < q.size(); ++c) {
      if (bound[c]) continue;
      const auto nb = q.neighbors(c);
      if (std::any_of(nb.begin(), nb.end(), [&](QueryVertex w) { return bound[w]; })) {
        bound[c] = true;
        order.push_back(c);
        break;
      }
    }
  }
  return order;
}

class Search {
 public:
  Search(const DynamicGraph& g, const QueryGraph& q, const Mapping& seed, OracleAnswer* out,
         std::size_t* count)
      : g_(g), q_(q), seed_(seed), out_(out), count_(count), order_(id_order(q)),
        mapping_(q.size(), kUnbound) {}

  void run() {
    if (q_.size() > g_.vertex_count()) return;
    extend(0);
  }

 private:
  bool used(VertexId v) const {
    return std::find(mapping_.begin(), mapping_.end(), v) != mapping_.end();
  }

  bool admissible(QueryVertex qv, VertexId v) const {
    if (g_.label(v) != q_.label(qv)) return false;
    if (seed_[qv] != kUnbound && seed_[qv] != v) return false;
    if (used(v)) return false;
    for (QueryVertex w : q_.neighbors(qv))
      if (mapping_[w] != kUnbound && !g_.has_edge(mapping_[w], v)) return false;
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      if (out_) out_->insert(mapping_);
      if (count_) ++*count_;
      return;
    }
    const QueryVertex qv = order_[depth];
    auto try_vertex = [&](VertexId v) {
      if (!admissible(qv, v)) return;
      mapping_[qv] = v;
      extend(depth + 1);
      mapping_[qv] = kUnbound;
    };
    if (depth == 0) {
      if (seed_[qv] != kUnbound) {
        if (g_.has_vertex(seed_[qv])) try_vertex(seed_[qv]);
        return;
      }
      for (VertexId v : g_.vertices()) try_vertex(v);
      return;
    }
    // Some already-bound neighbor exists by construction of the order.
    QueryVertex anchor = 0;
    for (QueryVertex w : q_.neighbors(qv))
      if (mapping_[w] != kUnbound) {
        anchor = w;
        break;
      }
    for (VertexId v : g_.neighbors(mapping_[anchor])) try_vertex(v);
  }

  const DynamicGraph& g_;
  const QueryGraph& q_;
  const Mapping& seed_;
  OracleAnswer* out_;
  std::size_t* count_;
  std::vector<QueryVertex> order_;
  Mapping mapping_;
};

}  // namespace

OracleAnswer enumerate_matches(const DynamicGraph& g, const QueryGraph& q) {
  return enumerate_matches_extending(g, q, Mapping(q.size(), kUnbound));
}

OracleAnswer enumerate_matches_extending(const DynamicGraph& g, const QueryGraph& q,
                                         const Mapping& seed) {
  OracleAnswer out;
  Search(g, q, seed, &out, nullptr).run();
  return out;
}

std::size_t count_matches(const DynamicGraph& g, const QueryGraph& q) {
  std::size_t n = 0;
  const Mapping seed(q.size(), kUnbound);
  Search(g, q, seed, nullptr, &n).run();
  return n;
}

}  // namespace dsm::oracle
