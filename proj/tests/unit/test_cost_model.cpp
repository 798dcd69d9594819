#include <cmath>
#include <random>
#include <sstream>

#include "dsm/bench.hpp"
#include "dsm/cost_model.hpp"
#include "dsm/matcher.hpp"
#include "helpers.hpp"

using namespace dsm;
using dsm::test::error_kind;

TEST_CASE("two-point and constant statistics") {
  const std::vector<EmbeddingVector> two{{0, 0}, {2, 2}};
  const auto s = collect_stats(two);
  CHECK(s.mean == std::vector<double>{1, 1});
  CHECK(s.variance == std::vector<double>{2, 2});
  const std::vector<EmbeddingVector> same(5, EmbeddingVector{3, 4});
  CHECK(collect_stats(same).variance == std::vector<double>{0, 0});
  CHECK(error_kind([] { collect_stats(std::vector<EmbeddingVector>{{1, 1}}); }) ==
        ErrorKind::TooFewVertices);
}

TEST_CASE("phi: known values and symmetry") {
  CHECK(phi(0) == 0.5);
  CHECK(phi(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-40, 40);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    CHECK(std::abs(phi(x) + phi(-x) - 1) < 1e-12);
  }
}

TEST_CASE("estimate at the mean and in the tail") {
  DimStats s;
  s.mean = {1, 2, 3, 4};
  s.variance = {1, 1, 2, 2};
  s.count = 100;
  const auto at_mean = estimate_cost(EmbeddingVector{1, 2, 3, 4}, s, 160);
  CHECK(at_mean.estimate == 160.0 / 16);
  for (double f : at_mean.factors) CHECK(f == 0.5);
  CHECK(estimate_cost(EmbeddingVector{1, 2, 3, 1e6}, s, 160).estimate == 0);
}

TEST_CASE("variance and standard-deviation divisors") {
  DimStats s;
  s.mean = {0};
  s.variance = {4};
  const EmbeddingVector q{-2};
  CHECK(estimate_cost(q, s, 1).factors[0] == doctest::Approx(phi(0.5)));
  CHECK(estimate_cost(q, s, 1, {SigmaForm::StdDev}).factors[0] == doctest::Approx(phi(1.0)));
}

TEST_CASE("degenerate variance") {
  DimStats s;
  s.mean = {2, 0};
  s.variance = {0, 1};
  CHECK(estimate_cost(EmbeddingVector{1, 0}, s, 10).factors[0] == 1.0);
  CHECK(estimate_cost(EmbeddingVector{3, 0}, s, 10).estimate == 0.0);
  CostModelOptions strict;
  strict.degenerate = DegeneratePolicy::Strict;
  CHECK(error_kind([&] { estimate_cost(EmbeddingVector{1, 0}, s, 10, strict); }) ==
        ErrorKind::DegenerateVariance);
}

TEST_CASE("estimate is monotone and bounded") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 5);
  DimStats s;
  s.mean = {1, 2, 0.5, 3};
  s.variance = {0.3, 1, 2, 0.1};
  for (int i = 0; i < 1000; ++i) {
    EmbeddingVector q{u(rng), u(rng), u(rng), u(rng)};
    const double base = estimate_cost(q, s, 500).estimate;
    CHECK(base >= 0);
    CHECK(base <= 500);
    q[static_cast<std::size_t>(rng() % 4)] += u(rng);
    CHECK(estimate_cost(q, s, 500).estimate <= base);
  }
}

TEST_CASE("spearman") {
  const std::vector<double> a{1, 2, 3, 4}, b{10, 20, 30, 40}, c{4, 3, 2, 1};
  CHECK(spearman(a, b) == doctest::Approx(1));
  CHECK(spearman(a, c) == doctest::Approx(-1));
  const std::vector<double> ties{1, 1, 2, 2};
  CHECK(spearman(ties, ties) == doctest::Approx(1));
  const std::vector<double> flat{3, 3, 3, 3};
  CHECK(spearman(a, flat) == 0);
}

TEST_CASE("Zipf SPUR lowers per-dimension means against uniform") {
  std::size_t lower = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = bench::generate_graph(300, 4, 0.25, 15, bench::LabelDistribution::Uniform, seed);
    EmbeddingConfig zipf;
    EmbeddingConfig uni;
    uni.mode = EmbeddingMode::BaseOptimized;
    const auto sz = collect_stats(g, EmbeddingTable(g, zipf));
    const auto su = collect_stats(g, EmbeddingTable(g, uni));
    for (std::size_t j = 0; j < sz.mean.size(); ++j) {
      ++total;
      lower += sz.mean[j] < su.mean[j];
    }
  }
  CHECK(static_cast<double>(lower) >= 0.95 * static_cast<double>(total));
}

TEST_CASE("mode comparison is deterministic and writes the CSV schema") {
  const auto g = bench::generate_graph(300, 4, 0.25, 5, bench::LabelDistribution::Zipf, 4);
  const auto qs = bench::sample_queries(g, 5, 5, 3, 4);
  const EmbeddingMode modes[] = {EmbeddingMode::CostModel, EmbeddingMode::CostModel};
  const auto r = compare_embedding_modes(g, qs, {}, {}, modes, "g");
  REQUIRE(r.rows.size() == 10);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r.rows[i].pruning_power == r.rows[i + 5].pruning_power);
    CHECK(r.rows[i].estimated_cost == r.rows[i + 5].estimated_cost);
    CHECK(r.rows[i].measured_candidates == r.rows[i + 5].measured_candidates);
  }
  std::ostringstream out;
  write_mode_csv(out, r.rows);
  const std::string text = out.str();
  CHECK(text.rfind("mode,graph,query_id,pruning_power,estimated_cost,measured_candidates,wall_clock_us\n", 0) == 0);
  CHECK(text.find("\ncost,g,0,") != std::string::npos);
}
