#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "dsm/bench.hpp"
#include "dsm/das3.hpp"
#include "dsm/matcher.hpp"
#include "dsm/oracle.hpp"
#include "dsm/substructure.hpp"
#include "helpers.hpp"

using namespace dsm;
using dsm::test::error_kind;
using dsm::test::make_graph;

namespace {

DegreeGroups groups(std::vector<std::size_t> inner) {
  DegreeGroups g;
  g.bounds = {0};
  g.bounds.insert(g.bounds.end(), inner.begin(), inner.end());
  g.bounds.push_back(kInfiniteDegree);
  return g;
}

EmbeddingConfig mode_cfg(EmbeddingMode m) {
  EmbeddingConfig c;
  c.mode = m;
  return c;
}

std::vector<std::size_t> power_law_degrees(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> out;
  std::uniform_real_distribution<double> u(0, 1);
  const double gamma = 1.5 + u(rng) * 1.5;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(static_cast<std::size_t>(std::floor(std::pow(1 - u(rng), -1 / (gamma - 1)))));
  return out;
}

}  // namespace

TEST_CASE("degree groups: trivial and worked examples") {
  const std::vector<std::size_t> degs{1, 1, 1, 2, 2, 3};
  CHECK(compute_degree_groups(degs, 1) == groups({}));
  const auto g = compute_degree_groups(degs, 3);
  CHECK(g == groups({1, 2}));
  CHECK(g.masses(degs) == std::vector<std::size_t>{3, 2, 1});
  // More groups than distinct degrees: one group per distinct degree.
  CHECK(compute_degree_groups(degs, 10) == groups({1, 2}));
  CHECK(error_kind([&] { compute_degree_groups(degs, 0); }) == ErrorKind::InvalidConfig);
  // Frozen from the exhaustive search in tests/oracles/embedding_oracle.py.
  CHECK(compute_degree_groups(std::vector<std::size_t>{1, 2, 2, 3, 3, 3, 4, 9}, 3) == groups({2, 3}));
  CHECK(compute_degree_groups(std::vector<std::size_t>{5, 5, 5, 5, 1, 2}, 2) == groups({2}));
  std::vector<std::size_t> ten{10, 10};
  for (std::size_t d = 1; d <= 10; ++d) ten.push_back(d);
  CHECK(compute_degree_groups(ten, 4) == groups({3, 6, 9}));
  CHECK(g.group_of(1) == 0);
  CHECK(g.group_of(2) == 1);
  CHECK(g.group_of(1000) == 2);
}

TEST_CASE("degree groups: masses differ by at most the largest single-degree frequency") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto degs = power_law_degrees(rng, 50 + rng() % 500);
    const std::size_t m = 1 + rng() % 6;
    const auto g = compute_degree_groups(degs, m);
    std::map<std::size_t, std::size_t> freq;
    for (auto d : degs)
      if (d > 0) ++freq[d];
    std::size_t top = 0;
    for (auto [d, n] : freq) top = std::max(top, n);
    const auto masses = g.masses(degs);
    CHECK(masses.size() == std::min(m, freq.size()));
    const auto [lo, hi] = std::minmax_element(masses.begin(), masses.end());
    CHECK(*hi - *lo <= top);
  }
}

TEST_CASE("sorted lists keep prefix sums and reject unknown removals") {
  SortedSpurLists lists(1);
  for (double x : {0.5, 0.2, 0.7}) lists.insert(3, SpurVector{x});
  CHECK(lists.length(3) == 3);
  const auto l = lists.list(3, 0);
  CHECK(std::vector<double>(l.begin(), l.end()) == std::vector<double>{0.2, 0.5, 0.7});
  CHECK(lists.sum_smallest(3, 0, 2) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(lists.sum_largest(3, 0, 2) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(error_kind([&] { lists.remove(3, SpurVector{0.3}); }) == ErrorKind::InconsistentState);
  lists.remove(3, SpurVector{0.5});
  CHECK(lists.length(3) == 2);
  CHECK(lists.length(99) == 0);
}

TEST_CASE("MBR of a three-leaf star at delta 2 in plain mode") {
  // Leaves with labels whose SPUR components are known; compare with the
  // exhaustive substructure enumeration.
  const auto cfg = mode_cfg(EmbeddingMode::Plain);
  const auto g = make_graph({1, 2, 3, 4}, {{0, 1}, {0, 2}, {0, 3}});
  const EmbeddingTable emb(g, cfg);
  SortedSpurLists lists(cfg.d);
  lists.build(g, emb);
  const Mbr box = mbr_for_degree(0, 1, 2, lists, emb);
  std::vector<double> comp;
  for (Label l : {2u, 3u, 4u}) comp.push_back(spur(l, cfg)[0]);
  std::sort(comp.begin(), comp.end());
  CHECK(box.low[2] == comp[0] + comp[1]);
  CHECK(box.high[2] == comp[1] + comp[2]);
  CHECK(box.low[0] == spur(1, cfg)[0]);
  CHECK(box.high[0] == box.low[0]);
  CHECK(error_kind([&] { mbr_for_degree(0, 1, 4, lists, emb); }) == ErrorKind::DegreeOutOfRange);
  CHECK(error_kind([&] { mbr_for_degree(0, 1, 0, lists, emb); }) == ErrorKind::DegreeOutOfRange);
  // delta = deg: the box collapses onto the vertex embedding.
  const Mbr full = mbr_for_degree(0, 1, 3, lists, emb);
  CHECK(full.low == emb.embedding_of(0));
  CHECK(full.high == emb.embedding_of(0));
}

TEST_CASE("MBR equals exhaustive substructure bounds") {
  for (auto mode : {EmbeddingMode::Plain, EmbeddingMode::BaseOptimized, EmbeddingMode::CostModel}) {
    const auto cfg = mode_cfg(mode);
    const auto g = bench::generate_graph(120, 4, 0.8, 6, bench::LabelDistribution::Uniform, 11);
    const EmbeddingTable emb(g, cfg);
    SortedSpurLists lists(cfg.d);
    lists.build(g, emb);
    for (VertexId v : g.vertices()) {
      if (g.degree(v) > 10) continue;
      for (std::size_t delta = 1; delta <= g.degree(v); ++delta) {
        const auto subs = oracle::enumerate_substructure_embeddings(g, v, delta, cfg);
        EmbeddingVector lo = subs.front(), hi = subs.front();
        for (const auto& s : subs)
          for (std::size_t j = 0; j < s.size(); ++j) {
            lo[j] = std::min(lo[j], s[j]);
            hi[j] = std::max(hi[j], s[j]);
          }
        const Mbr box = mbr_for_degree(v, g.label(v), delta, lists, emb);
        CHECK(box.low == lo);
        CHECK(box.high == hi);
      }
    }
  }
}

TEST_CASE("build: vertex of degree 5 appears in every group with capped ub_delta") {
  const auto g = make_graph({1, 2, 2, 2, 2, 2}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const auto cfg = mode_cfg(EmbeddingMode::CostModel);
  const EmbeddingTable emb(g, cfg);
  const auto index = build_synopses(g, emb, groups({2, 4}), make_grid_domain(g, emb, 5));
  REQUIRE(index.synopsis(0).entry(0));
  CHECK(index.synopsis(0).entry(0)->ub_delta == 2);
  CHECK(index.synopsis(1).entry(0)->ub_delta == 4);
  CHECK(index.synopsis(2).entry(0)->ub_delta == 5);
  CHECK(index.synopsis(2).entry(0)->ub_corner == emb.embedding_of(0));
  // Leaves have degree 1 and live only in the first group.
  CHECK(index.synopsis(0).entry_count() == 6);
  CHECK(index.synopsis(1).entry_count() == 1);
  CHECK(index.total_entries() == 8);
}

TEST_CASE("build: empty graph gives empty synopses") {
  const DynamicGraph g;
  const EmbeddingTable emb(g, {});
  const SynopsisIndex index(g, emb, SynopsisConfig{});
  CHECK(index.groups().count() == 1);
  CHECK(index.total_entries() == 0);
}

TEST_CASE("build: entry count identity and cell order") {
  const auto g = bench::generate_graph(300, 4, 0.5, 5, bench::LabelDistribution::Zipf, 3);
  const EmbeddingTable emb(g, {});
  const SynopsisIndex index(g, emb, SynopsisConfig{});
  std::size_t expect = 0;
  for (VertexId v : g.vertices())
    for (std::size_t j = 0; j < index.groups().count(); ++j) expect += g.degree(v) > index.groups().lower(j);
  CHECK(index.total_entries() == expect);
  for (std::size_t j = 0; j < index.groups().count(); ++j) {
    double last = std::numeric_limits<double>::infinity();
    std::size_t counted = 0;
    index.synopsis(j).for_each_cell([&](const Cell& c) {
      CHECK(c.key <= last);
      last = c.key;
      counted += c.members.size();
      CHECK(std::is_sorted(c.members.begin(), c.members.end()));
      for (std::size_t i = 0; i < c.members.size(); ++i)
        for (std::size_t k = 0; k < c.ub.size(); ++k) CHECK(c.corners[i * c.ub.size() + k] <= c.ub[k]);
      return true;
    });
    CHECK(counted == index.synopsis(j).entry_count());
  }
}

TEST_CASE("maintenance: insert then delete restores the synopses exactly") {
  DynamicGraph g = bench::generate_graph(100, 4, 0.3, 4, bench::LabelDistribution::Uniform, 5);
  EmbeddingTable emb(g, {});
  SynopsisIndex index(g, emb, SynopsisConfig{});
  const SynopsisIndex before = index;
  for (auto op : {UpdateOp::insert(0, 50), UpdateOp::erase(0, 50)}) {
    const auto eff = g.apply(op);
    emb.apply(g, eff);
    index.maintain(g, emb, eff);
  }
  CHECK(index == before);
}

TEST_CASE("maintenance: crossing a group boundary adds the next-group entry") {
  // groups (0,2], (2,4], (4,inf)
  DynamicGraph g = make_graph({1, 2, 2, 2}, {{0, 1}, {0, 2}});
  EmbeddingTable emb(g, {});
  SynopsisIndex index(g, emb, groups({2, 4}), make_grid_domain(g, emb, 5));
  CHECK_FALSE(index.synopsis(1).entry(0));
  const auto eff = g.apply(UpdateOp::insert(0, 3));
  emb.apply(g, eff);
  index.maintain(g, emb, eff);
  REQUIRE(index.synopsis(1).entry(0));
  CHECK(index.synopsis(1).entry(0)->ub_delta == 3);
  CHECK(index.synopsis(0).entry(0)->ub_delta == 2);
  CHECK(index.lists().length(0) == 3);
  CHECK(index == build_synopses(g, emb, index.groups(), index.domain()));
}

TEST_CASE("maintenance: random stream equals rebuild") {
  DynamicGraph g = bench::generate_graph(150, 4, 0.4, 5, bench::LabelDistribution::Zipf, 9);
  EmbeddingTable emb(g, {});
  SynopsisIndex index(g, emb, SynopsisConfig{});
  bench::Rng rng(21);
  VertexId next_new = 150;
  for (int step = 0; step < 500; ++step) {
    UpdateOp op;
    const auto edges = g.edges();
    if (rng.below(2) == 0 && !edges.empty()) {
      const auto e = edges[rng.below(edges.size())];
      op = UpdateOp::erase(e.first, e.second);
    } else if (rng.below(10) == 0) {
      op = UpdateOp::insert(static_cast<VertexId>(rng.below(150)), next_new++, {}, Label(1 + rng.below(5)));
    } else {
      VertexId a, b;
      do {
        a = static_cast<VertexId>(rng.below(g.id_bound()));
        b = static_cast<VertexId>(rng.below(g.id_bound()));
      } while (a == b || g.has_edge(a, b));
      op = UpdateOp::insert(a, b);
    }
    const auto eff = g.apply(op);
    emb.apply(g, eff);
    index.maintain(g, emb, eff);
  }
  const EmbeddingTable fresh_emb(g, {});
  CHECK(index == build_synopses(g, fresh_emb, index.groups(), index.domain()));
}

TEST_CASE("maintenance rejects an effect that disagrees with the lists") {
  DynamicGraph g = make_graph({1, 2}, {{0, 1}});
  EmbeddingTable emb(g, {});
  SynopsisIndex index(g, emb, SynopsisConfig{});
  UpdateEffect bogus;
  bogus.kind = UpdateKind::Insert;
  bogus.endpoints = {DegreeChange{0, 3, 4}, DegreeChange{1, 3, 4}};
  CHECK(error_kind([&] { index.maintain(g, emb, bogus); }) == ErrorKind::InconsistentState);
}

TEST_CASE("scan: query beyond the space finds nothing") {
  const auto g = bench::generate_graph(200, 4, 0.3, 5, bench::LabelDistribution::Uniform, 1);
  const EmbeddingTable emb(g, {});
  const SynopsisIndex index(g, emb, SynopsisConfig{});
  const EmbeddingVector far{1e9, 1e9, 1e9, 1e9};
  const auto r = index.scan(far, 2, 1, emb);
  CHECK(r.candidates.empty());
  CHECK(r.stats.survivors == 0);
  std::size_t above = 0;
  index.synopsis(index.groups().group_of(2)).for_each_cell([&](const Cell& c) {
    above += c.key >= key(far);
    return true;
  });
  CHECK(r.stats.cells_visited == above);
}

TEST_CASE("scan: star query keeps the data star center") {
  // Data star: center label 1 with leaves 2, 3, 4; query: center 1 with leaves 2, 3.
  const auto g = make_graph({1, 2, 3, 4, 1}, {{0, 1}, {0, 2}, {0, 3}, {4, 1}});
  const auto q = dsm::test::make_query({1, 2, 3}, {{0, 1}, {0, 2}});
  for (auto mode : {EmbeddingMode::Plain, EmbeddingMode::BaseOptimized, EmbeddingMode::CostModel}) {
    const EmbeddingTable emb(g, mode_cfg(mode));
    const SynopsisIndex index(g, emb, SynopsisConfig{});
    const auto qe = embed_query(q, emb);
    const auto r = index.scan(qe[0], 2, 1, emb);
    CHECK(std::binary_search(r.candidates.begin(), r.candidates.end(), VertexId{0}));
    CHECK_FALSE(std::binary_search(r.candidates.begin(), r.candidates.end(), VertexId{4}));
    CHECK(index.admits(0, 1, qe[0], 2, 1, emb));
    CHECK_FALSE(index.admits(4, 1, qe[0], 2, 1, emb));
  }
}

TEST_CASE("scan: no false dismissals against the oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = bench::generate_graph(200, 4, 0.25, 5, bench::LabelDistribution::Uniform, seed);
    const auto queries = bench::sample_queries(g, 10, 5, 3, seed);
    for (auto mode : {EmbeddingMode::Plain, EmbeddingMode::BaseOptimized, EmbeddingMode::CostModel}) {
      const EmbeddingTable emb(g, mode_cfg(mode));
      const SynopsisIndex index(g, emb, SynopsisConfig{});
      for (const auto& q : queries) {
        const auto qe = embed_query(q, emb);
        const auto truth = oracle::enumerate_matches(g, q);
        for (QueryVertex qv = 0; qv < q.size(); ++qv) {
          const auto r = index.scan(qe[qv], q.degree(qv), q.label(qv), emb);
          for (const auto& m : truth) CHECK(std::binary_search(r.candidates.begin(), r.candidates.end(), m[qv]));
          for (VertexId v : g.vertices())
            CHECK(index.admits(v, g.label(v), qe[qv], q.degree(qv), q.label(qv), emb) ==
                  std::binary_search(r.candidates.begin(), r.candidates.end(), v));
        }
      }
    }
  }
}

TEST_CASE("cell key cutoff is sound") {
  const auto g = bench::generate_graph(300, 4, 0.5, 5, bench::LabelDistribution::Uniform, 4);
  const EmbeddingTable emb(g, {});
  const SynopsisIndex index(g, emb, SynopsisConfig{});
  for (std::size_t j = 0; j < index.groups().count(); ++j)
    index.synopsis(j).for_each_cell([&](const Cell& c) {
      for (VertexId v : g.vertices())
        if (dominates(emb.embedding_of(v), c.ub)) CHECK(key(emb.embedding_of(v)) <= c.key);
      return true;
    });
}

TEST_CASE("synopsis dump format") {
  const auto g = make_graph({1, 2, 2}, {{0, 1}, {0, 2}});
  const EmbeddingTable emb(g, {});
  const SynopsisIndex index(g, emb, SynopsisConfig{});
  std::ostringstream out;
  index.dump(out);
  const std::string text = out.str();
  CHECK(text.find("# synopsis 0 degrees (0,1] entries=3") != std::string::npos);
  CHECK(text.find("cell ") != std::string::npos);
  CHECK(text.find(" entries=") != std::string::npos);
}

TEST_CASE("grid domain intervals") {
  const auto d = GridDomain::make(5, 2, 10);
  CHECK(d.interval_of(0) == 0);
  CHECK(d.interval_of(2) == 0);
  CHECK(d.interval_of(2.0000001) == 1);
  CHECK(d.interval_of(1e12) == 4);
  CHECK(d.interval_upper(4) == std::numeric_limits<double>::infinity());
  CHECK(error_kind([] { GridDomain::make(0, 2, 1); }) == ErrorKind::InvalidConfig);
  CHECK(error_kind([] { GridDomain::make(1000, 16, 1); }) == ErrorKind::InvalidConfig);
}
