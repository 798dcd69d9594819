// dsm: generate workloads, run the continuous matcher, check it against
// brute-force recompute, and emit benchmark CSV.
#include <CLI11.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dsm/bench.hpp"
#include "dsm/cost_model.hpp"
#include "dsm/error.hpp"
#include "dsm/kernels.hpp"
#include "dsm/matcher.hpp"
#include "dsm/oracle.hpp"

namespace fs = std::filesystem;
using namespace dsm;

namespace {

struct Options {
  bench::BenchConfig bench;
  std::string embedding_mode = "cost";
  std::string label_dist = "uniform";
  std::string deletion_mode = "indexed";
  std::string graph_path, stream_path, queries_path;
  std::string out_path, answers_path, metrics_path, dump_path, modes_csv;
  std::string out_dir = ".";
  std::vector<std::string> baselines{"engine"};
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  bool check_candidates = false;
};

void add_workload_flags(CLI::App* app, Options& o) {
  auto& b = o.bench;
  app->add_option("--seed", b.seed, "master seed");
  app->add_option("--vertices", b.vertices, "|V| of the generated graph");
  app->add_option("--labels", b.labels, "label alphabet size");
  app->add_option("--label-dist", o.label_dist, "uniform | gaussian | zipf");
  app->add_option("--avg-degree", b.avg_degree, "target average degree of the data graph");
  app->add_option("--ring-k", b.ring_k, "ring neighbors k (0 = derive from --avg-degree)");
  app->add_option("--shortcut-p", b.shortcut_p, "shortcut probability (<0 = derive)");
  app->add_option("--queries", b.query_count, "number of sampled queries");
  app->add_option("--query-size", b.query_size, "|V(q)|");
  app->add_option("--query-avg-degree", b.query_avg_degree, "average query degree");
  app->add_option("--insertion-rate", b.insertion_rate, "share of edges streamed as insertions");
  app->add_option("--deletion-rate", b.deletion_rate, "share of edges streamed as deletions");
}

void add_engine_flags(CLI::App* app, Options& o) {
  auto& e = o.bench.embedding;
  app->add_option("--d", e.d, "SPUR dimensionality");
  app->add_option("--alpha", e.alpha, "embedding alpha");
  app->add_option("--beta", e.beta, "embedding beta");
  app->add_option("--embedding-mode", o.embedding_mode, "plain | base | cost");
  app->add_option("--zipf-s", e.zipf_exponent, "Zipf exponent of cost-model SPUR draws");
  app->add_option("--zipf-ranks", e.zipf_ranks, "Zipf rank count N");
  app->add_option("--zipf-buckets", e.zipf_buckets, "equal-mass buckets b");
  app->add_option("--salt", e.seed_salt, "SPUR/base seed salt");
  app->add_option("--groups", o.bench.synopsis.groups, "degree groups m");
  app->add_option("--cells", o.bench.synopsis.cells_per_dim, "grid cells per dimension K");
  app->add_option("--deletion-mode", o.deletion_mode, "indexed | scan");
}

void add_input_flags(CLI::App* app, Options& o, bool required) {
  auto* g = app->add_option("--graph", o.graph_path, "initial data graph file");
  app->add_option("--stream", o.stream_path, "update stream file");
  auto* q = app->add_option("--queries-file", o.queries_path, "query graphs file");
  if (required) {
    g->required();
    q->required();
  }
}

// Every long flag can also come from DSM_<FLAG_NAME>.
void bind_env(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      std::string name = "DSM_";
      for (char c : opt->get_lnames().front())
        name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (name == "DSM_HELP") continue;
      opt->envname(name);
    }
  }
}

void finalize(Options& o) {
  o.bench.embedding.mode = parse_embedding_mode(o.embedding_mode);
  o.bench.label_distribution = bench::parse_label_distribution(o.label_dist);
  o.bench.embedding.validate();
}

EngineConfig engine_config(const Options& o) {
  EngineConfig cfg;
  cfg.embedding = o.bench.embedding;
  cfg.synopsis = o.bench.synopsis;
  if (o.deletion_mode == "scan")
    cfg.deletion = DeletionMode::Scan;
  else if (o.deletion_mode != "indexed")
    throw Error(ErrorKind::InvalidConfig, "unknown deletion mode '" + o.deletion_mode + "'");
  return cfg;
}

struct Workload {
  DynamicGraph full;
  DynamicGraph g0;
  std::vector<UpdateOp> stream;
  std::vector<QueryGraph> queries;
};

Workload generate(const bench::BenchConfig& b) {
  Workload w;
  w.full = bench::generate_graph(b);
  auto split = bench::split_stream(w.full, b.insertion_rate, b.deletion_rate, b.seed);
  w.g0 = std::move(split.g0);
  w.stream = std::move(split.stream);
  w.queries = bench::sample_queries(w.full, b.query_count, b.query_size, b.query_avg_degree, b.seed);
  return w;
}

Workload load_or_generate(const Options& o) {
  if (o.graph_path.empty()) return generate(o.bench);
  Workload w;
  w.g0 = load_graph_file(o.graph_path);
  if (!o.stream_path.empty()) w.stream = load_stream_file(o.stream_path);
  if (o.queries_path.empty()) throw Error(ErrorKind::InvalidConfig, "--graph needs --queries-file");
  w.queries = bench::load_queries_file(o.queries_path);
  return w;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
  return out;
}

int cmd_gen(const Options& o) {
  const Workload w = generate(o.bench);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  {
    auto out = open_out((dir / "full.graph").string());
    write_graph(out, w.full);
  }
  {
    auto out = open_out((dir / "g0.graph").string());
    write_graph(out, w.g0);
  }
  {
    auto out = open_out((dir / "stream.txt").string());
    write_stream(out, w.stream);
  }
  {
    auto out = open_out((dir / "queries.graph").string());
    bench::write_queries(out, w.queries);
  }
  std::cout << "wrote " << w.full.vertex_count() << " vertices, " << w.g0.edge_count()
            << " initial edges, " << w.stream.size() << " updates, " << w.queries.size()
            << " queries to " << dir.string() << '\n';
  return 0;
}

int cmd_run(const Options& o) {
  const Workload w = load_or_generate(o);
  const EngineConfig cfg = engine_config(o);
  std::ofstream answers_file;
  std::ostream* answers = &std::cout;
  if (!o.answers_path.empty()) {
    answers_file = open_out(o.answers_path);
    answers = &answers_file;
  }
  if (!o.dump_path.empty()) {
    const EmbeddingTable emb(w.g0, cfg.embedding);
    const SynopsisIndex index(w.g0, emb, cfg.synopsis);
    auto out = open_out(o.dump_path);
    index.dump(out);
  }
  bench::RunMetrics m;
  const bool naive = !o.baselines.empty() && o.baselines.front() == "naive";
  if (naive)
    m = bench::run_naive(w.g0, w.stream, w.queries, answers);
  else
    m = bench::run_engine(w.g0, w.stream, w.queries, cfg, answers);
  if (!o.metrics_path.empty()) {
    auto out = open_out(o.metrics_path);
    bench::write_metrics_csv(out, m, w.queries);
  }
  return 0;
}

int cmd_oracle(const Options& o) {
  Workload w = load_or_generate(o);
  DynamicGraph g = w.g0;
  for (const auto& op : w.stream) g.apply(op);
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    std::cout << "# query=" << i << '\n';
    for (const auto& m : oracle::enumerate_matches(g, w.queries[i])) std::cout << format_mapping(m) << '\n';
  }
  return 0;
}

int cmd_verify(Options o) {
  const Workload w = load_or_generate(o);
  bench::VerifyOptions vo;
  vo.check_candidates = o.check_candidates;
  vo.check_delete_modes = true;
  const auto verdict = bench::recompute_stream_check(w.g0, w.stream, w.queries, engine_config(o), vo);
  bench::write_verdict(std::cout, verdict);
  return verdict.ok ? 0 : 1;
}

int cmd_bench(const Options& o) {
  const Workload w = load_or_generate(o);
  const EngineConfig cfg = engine_config(o);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.out_path.empty()) {
    file = open_out(o.out_path);
    out = &file;
  }
  bool header = true;
  for (const auto& b : o.baselines) {
    bench::RunMetrics m;
    if (b == "engine")
      m = bench::run_engine(w.g0, w.stream, w.queries, cfg);
    else if (b == "naive")
      m = bench::run_naive(w.g0, w.stream, w.queries);
    else
      throw Error(ErrorKind::InvalidConfig, "unknown baseline '" + b + "'");
    bench::write_metrics_csv(*out, m, w.queries, header);
    header = false;
  }
  if (!o.modes_csv.empty()) {
    const EmbeddingMode modes[] = {EmbeddingMode::Plain, EmbeddingMode::BaseOptimized,
                                   EmbeddingMode::CostModel};
    const auto cmp = compare_embedding_modes(w.g0, w.queries, cfg.embedding, cfg.synopsis, modes,
                                             o.graph_path.empty() ? "synthetic" : o.graph_path);
    auto f = open_out(o.modes_csv);
    write_mode_csv(f, cmp.rows);
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.out_path.empty()) {
    file = open_out(o.out_path);
    out = &file;
  }
  bool header = true;
  for (const auto& value : o.sweep_values) {
    Options v = o;
    auto& b = v.bench;
    const double x = std::stod(value);
    const auto n = static_cast<std::size_t>(x);
    if (o.sweep_param == "d") b.embedding.d = n;
    else if (o.sweep_param == "beta-alpha") b.embedding.beta = b.embedding.alpha * x;
    else if (o.sweep_param == "m") b.synopsis.groups = n;
    else if (o.sweep_param == "K") b.synopsis.cells_per_dim = n;
    else if (o.sweep_param == "labels") b.labels = n;
    else if (o.sweep_param == "query-size") b.query_size = n;
    else if (o.sweep_param == "query-avg-degree") b.query_avg_degree = x;
    else if (o.sweep_param == "avg-degree") b.avg_degree = x;
    else if (o.sweep_param == "vertices") b.vertices = n;
    else throw Error(ErrorKind::InvalidConfig, "cannot sweep '" + o.sweep_param + "'");
    b.embedding.validate();
    const Workload w = generate(b);
    const auto m = bench::run_engine(w.g0, w.stream, w.queries, engine_config(v));
    bench::write_metrics_csv(*out, m, w.queries, header, o.sweep_param + "," + value + ",",
                             "param,value,");
    header = false;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Continuous subgraph matching over edge update streams"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate graph, stream and queries into --out-dir");
  add_workload_flags(gen, o);
  gen->add_option("--out-dir", o.out_dir, "output directory");

  auto* run = app.add_subcommand("run", "run the engine over G0 + stream, print answer deltas");
  add_workload_flags(run, o);
  add_engine_flags(run, o);
  add_input_flags(run, o, false);
  run->add_option("--answers", o.answers_path, "delta output file (default stdout)");
  run->add_option("--metrics", o.metrics_path, "metrics CSV file");
  run->add_option("--dump-synopsis", o.dump_path, "write the initial synopses as text");
  run->add_option("--baseline", o.baselines, "engine | naive")->expected(1);

  auto* orc = app.add_subcommand("oracle", "brute-force answers on the final snapshot");
  add_workload_flags(orc, o);
  add_input_flags(orc, o, false);

  auto* ver = app.add_subcommand("verify", "engine vs snapshot recompute after every update");
  add_workload_flags(ver, o);
  add_engine_flags(ver, o);
  add_input_flags(ver, o, false);
  ver->add_flag("--check-candidates", o.check_candidates, "also check scan recall against the oracle");

  auto* ben = app.add_subcommand("bench", "engine and/or naive runs as metrics CSV");
  add_workload_flags(ben, o);
  add_engine_flags(ben, o);
  add_input_flags(ben, o, false);
  ben->add_option("--baselines", o.baselines, "engine,naive")->delimiter(',');
  ben->add_option("--out", o.out_path, "CSV file (default stdout)");
  ben->add_option("--modes-csv", o.modes_csv, "also compare embedding modes into this CSV");

  auto* swp = app.add_subcommand("sweep", "vary one parameter, one engine run per value");
  add_workload_flags(swp, o);
  add_engine_flags(swp, o);
  swp->add_option("--param", o.sweep_param,
                  "d | beta-alpha | m | K | labels | query-size | query-avg-degree | avg-degree | vertices")
      ->required();
  swp->add_option("--values", o.sweep_values, "comma-separated values")->delimiter(',')->required();
  swp->add_option("--out", o.out_path, "CSV file (default stdout)");

  bind_env(app);
  CLI11_PARSE(app, argc, argv);

  try {
    if (ver->parsed() && o.graph_path.empty() && o.bench.vertices > 1000) {
      // verify defaults to the desk profile unless told otherwise
      const auto desk = bench::BenchConfig::desk();
      if (ver->count("--vertices") == 0) o.bench.vertices = desk.vertices;
      if (ver->count("--queries") == 0) o.bench.query_count = desk.query_count;
    }
    finalize(o);
    if (gen->parsed()) return cmd_gen(o);
    if (run->parsed()) return cmd_run(o);
    if (orc->parsed()) return cmd_oracle(o);
    if (ver->parsed()) return cmd_verify(o);
    if (ben->parsed()) return cmd_bench(o);
    if (swp->parsed()) return cmd_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "dsm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
