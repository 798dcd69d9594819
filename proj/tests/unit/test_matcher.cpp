#include <algorithm>
#include <thread>

#include "dsm/bench.hpp"
#include "dsm/matcher.hpp"
#include "dsm/oracle.hpp"
#include "helpers.hpp"

using namespace dsm;
using dsm::test::make_graph;
using dsm::test::make_query;

namespace {

std::vector<Mapping> oracle_sorted(const DynamicGraph& g, const QueryGraph& q) {
  const auto a = oracle::enumerate_matches(g, q);
  return {a.begin(), a.end()};
}

}  // namespace

TEST_CASE("query embedding: one neighbor gives that neighbor's SPUR as SPAN") {
  const auto g = make_graph({1, 2}, {{0, 1}});
  const EmbeddingTable emb(g, {});
  const auto q = make_query({1, 2}, {{0, 1}});
  const auto qe = embed_query(q, emb);
  CHECK(qe[0] == emb.embedding_of(0));
  CHECK(qe[1] == emb.embedding_of(1));
}

TEST_CASE("query embedding matches a data vertex with the same neighborhood") {
  const auto g = make_graph({5, 1, 2, 2}, {{0, 1}, {0, 2}, {0, 3}});
  const EmbeddingTable emb(g, {});
  const auto q = make_query({2, 5, 1, 2}, {{1, 0}, {1, 2}, {1, 3}});
  CHECK(embed_query(q, emb)[1] == emb.embedding_of(0));
}

TEST_CASE("sampled queries are dominated at their anchor") {
  const auto g = bench::generate_graph(300, 4, 0.3, 5, bench::LabelDistribution::Uniform, 2);
  const EmbeddingTable emb(g, {});
  for (const auto& q : bench::sample_queries(g, 10, 5, 3, 2)) {
    const auto qe = embed_query(q, emb);
    for (const auto& m : oracle::enumerate_matches(g, q))
      for (QueryVertex qv = 0; qv < q.size(); ++qv) CHECK(dominates(qe[qv], emb.embedding_of(m[qv])));
  }
}

TEST_CASE("plan: greedy trace on a path") {
  const auto q = make_query({1, 1, 1}, {{0, 1}, {1, 2}});
  const std::size_t sizes[] = {5, 1, 3};
  CHECK(make_plan(q, sizes) == QueryPlan{1, 2, 0});
  const std::size_t equal[] = {4, 4, 4};
  CHECK(make_plan(q, equal) == QueryPlan{0, 1, 2});
  const QueryVertex prefix[] = {2, 1};
  CHECK(make_plan(q, sizes, prefix) == QueryPlan{2, 1, 0});
}

TEST_CASE("plan: random queries always give a connected order") {
  const auto g = bench::generate_graph(200, 4, 0.5, 3, bench::LabelDistribution::Uniform, 8);
  bench::Rng rng(3);
  for (const auto& q : bench::sample_queries(g, 30, 7, 3, 8)) {
    std::vector<std::size_t> sizes(q.size());
    for (auto& s : sizes) s = rng.below(5);
    const auto plan = make_plan(q, sizes);
    CHECK(is_valid_plan(q, plan));
    CHECK(sizes[plan[0]] == *std::min_element(sizes.begin(), sizes.end()));
  }
}

TEST_CASE("refine: base cases and seeds") {
  const auto g = make_graph({1, 2, 3, 2}, {{0, 1}, {1, 2}, {0, 3}});
  const auto q = make_query({1, 2}, {{0, 1}});
  const QueryPlan plan{0, 1};
  CandidateSets cands{{0}, {1, 3}};
  const VertexId full[] = {0, 3};
  CHECK(refine(g, q, plan, cands, full, 2) == std::set<Mapping>{{0, 3}});
  CHECK(refine(g, q, plan, cands, {}, 0) == std::set<Mapping>{{0, 1}, {0, 3}});
  const VertexId seed[] = {0};
  CHECK(refine(g, q, plan, CandidateSets{{0}, {3}}, seed, 1) == std::set<Mapping>{{0, 3}});
  CHECK(refine(g, q, plan, CandidateSets{{0}, {}}, {}, 0).empty());
}

TEST_CASE("refine equals the oracle restricted to the seed, for any valid plan") {
  const auto g = bench::generate_graph(150, 4, 0.4, 3, bench::LabelDistribution::Uniform, 4);
  for (const auto& q : bench::sample_queries(g, 10, 5, 3, 4)) {
    CandidateSets all(q.size());
    for (QueryVertex qv = 0; qv < q.size(); ++qv)
      for (VertexId v : g.vertices())
        if (g.label(v) == q.label(qv)) all[qv].push_back(v);
    const auto truth = oracle::enumerate_matches(g, q);
    std::vector<std::size_t> sizes(q.size(), 0);
    for (QueryVertex first = 0; first < q.size(); ++first) {
      std::fill(sizes.begin(), sizes.end(), 1);
      sizes[first] = 0;
      CHECK(refine(g, q, make_plan(q, sizes), all, {}, 0) == truth);
    }
    if (truth.empty()) continue;
    const QueryPlan plan = make_plan(q, sizes);
    const Mapping& some = *truth.begin();
    const VertexId seed[] = {some[plan[0]]};
    Mapping partial(q.size(), oracle::kUnbound);
    partial[plan[0]] = some[plan[0]];
    CHECK(refine(g, q, plan, all, seed, 1) == oracle::enumerate_matches_extending(g, q, partial));
  }
}

TEST_CASE("initial match: single edge, triangle, symmetric triangle") {
  const auto cfg = EngineConfig{};
  {
    Engine e(make_graph({1, 2, 3}, {{0, 1}, {1, 2}}), cfg);
    e.register_query(make_query({1, 2}, {{0, 1}}));
    CHECK(e.answers(0) == std::vector<Mapping>{{0, 1}});
  }
  {
    Engine e(make_graph({1, 2, 3}, {{0, 1}, {1, 2}, {0, 2}}), cfg);
    e.register_query(make_query({1, 2, 3}, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK(e.answers(0).size() == 1);
    Engine same(make_graph({4, 4, 4}, {{0, 1}, {1, 2}, {0, 2}}), cfg);
    same.register_query(make_query({4, 4, 4}, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK(same.answers(0).size() == 6);
  }
}

TEST_CASE("initial match equals the oracle on random small-world graphs") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = bench::generate_graph(200, 4, 0.25, 5, bench::LabelDistribution::Uniform, seed);
    const auto queries = bench::sample_queries(g, 20, 4 + seed % 3, 3, seed);
    Engine e(g);
    for (const auto& q : queries) e.register_query(q);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      CHECK(e.answers(i) == oracle_sorted(g, queries[i]));
      CHECK(is_valid_plan(queries[i], e.query(i).plan));
    }
  }
}

TEST_CASE("on_insert: unrelated labels give nothing") {
  Engine e(make_graph({1, 2, 7, 8}, {{0, 1}}));
  e.register_query(make_query({1, 2}, {{0, 1}}));
  const auto r = e.process_update(UpdateOp::insert(2, 3));
  CHECK(r.deltas[0].added.empty());
}

TEST_CASE("on_insert: single-edge query gets the new edge in either direction") {
  Engine e(make_graph({1, 2, 2, 1}, {{0, 1}}));
  e.register_query(make_query({1, 2}, {{0, 1}}));
  const auto r = e.process_update(UpdateOp::insert(2, 3));  // (B, A) order
  CHECK(r.deltas[0].added == std::vector<Mapping>{{3, 2}});
}

TEST_CASE("on_insert: equal labels give both mappings") {
  Engine e(make_graph({1, 1, 1}, {{0, 1}}));
  e.register_query(make_query({1, 1}, {{0, 1}}));
  CHECK(e.answers(0).size() == 2);
  const auto r = e.process_update(UpdateOp::insert(1, 2));
  CHECK(r.deltas[0].added == std::vector<Mapping>{{1, 2}, {2, 1}});
  CHECK(e.answers(0) == oracle_sorted(e.graph(), e.query(0).graph));
}

TEST_CASE("on_delete: removes exactly the answers using the edge") {
  Engine e(make_graph({1, 2, 1}, {{0, 1}, {1, 2}}));
  e.register_query(make_query({1, 2}, {{0, 1}}));
  auto r = e.process_update(UpdateOp::erase(2, 1));
  CHECK(r.deltas[0].removed == std::vector<Mapping>{{2, 1}});
  CHECK(e.answers(0) == std::vector<Mapping>{{0, 1}});
  e.process_update(UpdateOp::insert(0, 2));
  r = e.process_update(UpdateOp::erase(0, 2));
  CHECK(r.deltas[0].removed.empty());
  r = e.process_update(UpdateOp::erase(0, 1));
  CHECK(e.answers(0).empty());
}

TEST_CASE("answer set index and scan deletion agree") {
  const auto q = make_query({1, 1, 1}, {{0, 1}, {1, 2}});
  AnswerSet a, b;
  for (const Mapping& m : {Mapping{0, 1, 2}, Mapping{2, 1, 0}, Mapping{1, 2, 3}, Mapping{3, 4, 5}}) {
    CHECK(a.insert(m, q));
    b.insert(m, q);
  }
  CHECK_FALSE(a.insert({0, 1, 2}, q));
  CHECK(a.index_consistent(q));
  const auto x = a.remove_edge(edge_key(1, 2), q, DeletionMode::Indexed);
  const auto y = b.remove_edge(edge_key(2, 1), q, DeletionMode::Scan);
  CHECK(x == y);
  CHECK(x.size() == 3);
  CHECK(a.sorted() == b.sorted());
  CHECK(a.index_consistent(q));
}

TEST_CASE("insert then delete of one edge nets out") {
  const auto g = bench::generate_graph(200, 4, 0.25, 4, bench::LabelDistribution::Uniform, 6);
  Engine e(g);
  for (const auto& q : bench::sample_queries(g, 10, 4, 3, 6)) e.register_query(q);
  std::vector<std::vector<Mapping>> before;
  for (std::size_t i = 0; i < e.query_count(); ++i) before.push_back(e.answers(i));
  VertexId a = 0, b = 100;
  while (g.has_edge(a, b)) ++b;
  const auto ins = e.process_update(UpdateOp::insert(a, b));
  const auto del = e.process_update(UpdateOp::erase(a, b));
  for (std::size_t i = 0; i < e.query_count(); ++i) {
    CHECK(ins.deltas[i].added == del.deltas[i].removed);
    CHECK(e.answers(i) == before[i]);
  }
}

TEST_CASE("engine with no queries still maintains state") {
  Engine e(make_graph({1, 2}, {{0, 1}}));
  const auto r = e.process_update(UpdateOp::insert(1, 2, {}, 3));
  CHECK(r.deltas.empty());
  CHECK(e.synopses().total_entries() > 0);
  CHECK(e.graph().has_edge(1, 2));
}

TEST_CASE("insertion deltas use the inserted edge; answers stay valid") {
  const auto full = bench::generate_graph(200, 4, 0.25, 5, bench::LabelDistribution::Uniform, 12);
  const auto split = bench::split_stream(full, 0.1, 0, 12);
  const auto queries = bench::sample_queries(full, 10, 5, 3, 12);
  Engine e(split.g0);
  for (const auto& q : queries) e.register_query(q);
  for (const auto& op : split.stream) {
    const auto r = e.process_update(op);
    const EdgeKey ek = edge_key(op.u, op.v);
    for (const auto& d : r.deltas) {
      const auto& q = queries[d.query];
      for (const auto& m : d.added) {
        CHECK(is_valid_mapping(e.graph(), q, m));
        bool uses = false;
        for (auto [a, b] : q.edges()) uses |= edge_key(m[a], m[b]) == ek;
        CHECK(uses);
      }
    }
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(e.query(i).answers.index_consistent(queries[i]));
    for (const auto& m : e.answers(i)) CHECK(is_valid_mapping(e.graph(), queries[i], m));
  }
}

TEST_CASE("readers may run concurrently between updates") {
  const auto g = bench::generate_graph(200, 4, 0.25, 5, bench::LabelDistribution::Uniform, 13);
  Engine e(g);
  for (const auto& q : bench::sample_queries(g, 4, 4, 3, 13)) e.register_query(q);
  const auto expect = e.answers(0);
  std::vector<std::thread> readers;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t)
    readers.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) ok[t] += e.answers(0) == expect;
    });
  for (auto& r : readers) r.join();
  for (int v : ok) CHECK(v == 50);
}
