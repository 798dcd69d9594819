#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "dsm/error.hpp"
#include "dsm/graph_store.hpp"

namespace dsm {

namespace {

class LineTokens {
 public:
  LineTokens(std::string_view line, std::size_t line_no) : line_no_(line_no) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      if (j > i) tokens_.push_back(line.substr(i, j - i));
      i = j;
    }
  }

  bool empty() const { return tokens_.empty(); }
  std::size_t size() const { return tokens_.size(); }
  std::string_view operator[](std::size_t i) const { return tokens_[i]; }

  template <class T>
  T number(std::size_t i) const {
    T value{};
    const auto tok = tokens_[i];
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      fail("expected a non-negative integer, got '" + std::string(tok) + "'");
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

  std::vector<std::string_view> tokens_;
  std::size_t line_no_;
};

struct PendingGraph {
  struct Edge {
    VertexId u, v;
    std::size_t line;
  };
  std::optional<std::pair<std::size_t, std::size_t>> header;
  std::size_t header_line = 0;
  std::vector<std::pair<VertexId, Label>> vertices;
  std::vector<std::size_t> vertex_lines;
  std::vector<Edge> edges;

  DynamicGraph build() const {
    DynamicGraph g;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      try {
        g.add_vertex(vertices[i].first, vertices[i].second);
      } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(vertex_lines[i]) + ": " + e.what());
      }
    }
    for (const auto& e : edges) {
      try {
        g.add_edge(e.u, e.v);
      } catch (const Error& err) {
        throw Error(err.kind(), "line " + std::to_string(e.line) + ": " + err.what());
      }
    }
    if (header && (header->first != g.vertex_count() || header->second != g.edge_count()))
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(header_line) + ": header declares " +
                      std::to_string(header->first) + " vertices and " +
                      std::to_string(header->second) + " edges, found " +
                      std::to_string(g.vertex_count()) + " and " + std::to_string(g.edge_count()));
    return g;
  }
};

std::vector<PendingGraph> parse_graphs(std::istream& in) {
  std::vector<PendingGraph> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    LineTokens tok(line, line_no);
    if (tok.empty()) continue;
    const auto tag = tok[0];
    if (tag == "t") {
      if (tok.size() != 3) tok.fail("expected 't <num_vertices> <num_edges>'");
      out.emplace_back();
      out.back().header = {tok.number<std::size_t>(1), tok.number<std::size_t>(2)};
      out.back().header_line = line_no;
      continue;
    }
    if (out.empty()) out.emplace_back();
    auto& g = out.back();
    if (tag == "v") {
      if (tok.size() != 3) tok.fail("expected 'v <id> <label>'");
      g.vertices.emplace_back(tok.number<VertexId>(1), tok.number<Label>(2));
      g.vertex_lines.push_back(line_no);
    } else if (tag == "e") {
      if (tok.size() != 3) tok.fail("expected 'e <u> <v>'");
      g.edges.push_back({tok.number<VertexId>(1), tok.number<VertexId>(2), line_no});
    } else {
      tok.fail("unknown record '" + std::string(tag) + "'");
    }
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  return in;
}

}  // namespace

DynamicGraph load_graph(std::istream& in) {
  auto pending = parse_graphs(in);
  if (pending.empty()) return {};
  if (pending.size() > 1)
    throw Error(ErrorKind::ParseError, "line " + std::to_string(pending[1].header_line) +
                                           ": second graph header in a single-graph file");
  return pending.front().build();
}

DynamicGraph load_graph_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_graph(in);
}

std::vector<DynamicGraph> load_graphs(std::istream& in) {
  std::vector<DynamicGraph> out;
  for (const auto& p : parse_graphs(in)) out.push_back(p.build());
  return out;
}

std::vector<DynamicGraph> load_graphs_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_graphs(in);
}

void write_graph(std::ostream& out, const DynamicGraph& g) {
  out << "t " << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (VertexId v : g.vertices()) out << "v " << v << ' ' << g.label(v) << '\n';
  for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
}

std::vector<UpdateOp> load_stream(std::istream& in) {
  std::vector<UpdateOp> ops;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    LineTokens tok(line, line_no);
    if (tok.empty()) continue;
    UpdateOp op;
    if (tok[0] == "+") {
      // `+ u v`, `+ u v lu lv`, optionally followed by an ignored timestamp.
      if (tok.size() != 3 && tok.size() != 5 && tok.size() != 6)
        tok.fail("expected '+ <u> <v> [<label_u> <label_v>]'");
      op.kind = UpdateKind::Insert;
      if (tok.size() >= 5) {
        op.label_u = tok.number<Label>(3);
        op.label_v = tok.number<Label>(4);
      }
      if (tok.size() == 6) (void)tok.number<std::uint64_t>(5);
    } else if (tok[0] == "-") {
      if (tok.size() != 3 && tok.size() != 4) tok.fail("expected '- <u> <v>'");
      op.kind = UpdateKind::Delete;
      if (tok.size() == 4) (void)tok.number<std::uint64_t>(3);
    } else {
      tok.fail("unknown stream record '" + std::string(tok[0]) + "'");
    }
    op.u = tok.number<VertexId>(1);
    op.v = tok.number<VertexId>(2);
    op.timestamp = static_cast<std::int64_t>(ops.size()) + 1;
    ops.push_back(op);
  }
  return ops;
}

std::vector<UpdateOp> load_stream_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_stream(in);
}

void write_stream(std::ostream& out, std::span<const UpdateOp> ops) {
  for (const auto& op : ops) {
    if (op.kind == UpdateKind::Insert) {
      out << "+ " << op.u << ' ' << op.v;
      if (op.label_u && op.label_v) out << ' ' << *op.label_u << ' ' << *op.label_v;
    } else {
      out << "- " << op.u << ' ' << op.v;
    }
    out << '\n';
  }
}

}  // namespace dsm
