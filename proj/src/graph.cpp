#include "sparsity/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace sparsity {

Graph::Graph(std::size_t n, std::size_t degree_bound, std::span<const Endpoints> edges)
    : degree_bound_(degree_bound), adjacency_(n) {
  edges_.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw BadEndpoint("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") has an endpoint outside [0," + std::to_string(n) + ")");
    }
    const auto id = static_cast<EdgeId>(edges_.size());
    if (u == v) {
      if (adjacency_[u].size() + 2 > degree_bound_) throw DegreeExceeded(u);
      adjacency_[u].push_back({u, id});
      adjacency_[u].push_back({u, id});
    } else {
      if (adjacency_[u].size() + 1 > degree_bound_) throw DegreeExceeded(u);
      if (adjacency_[v].size() + 1 > degree_bound_) throw DegreeExceeded(v);
      adjacency_[u].push_back({v, id});
      adjacency_[v].push_back({u, id});
    }
    edges_.push_back({u, v});
  }
}

std::optional<Incidence> Graph::at_port(VertexId v, Port i) const {
  const auto& adj = adjacency_.at(v);
  if (i == 0 || i > adj.size()) return std::nullopt;
  return adj[i - 1];
}

std::vector<Port> Graph::ports_of(VertexId v, EdgeId e) const {
  std::vector<Port> out;
  const auto& adj = adjacency_.at(v);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (adj[i].edge == e) out.push_back(static_cast<Port>(i + 1));
  }
  return out;
}

Graph Graph::edge_subgraph(std::span<const EdgeId> keep) const {
  std::vector<Endpoints> kept;
  kept.reserve(keep.size());
  for (EdgeId e : keep) kept.push_back(edges_.at(e));
  return Graph(n(), degree_bound_, kept);
}

Graph Graph::induced(std::span<const VertexId> vertices) const {
  std::unordered_map<VertexId, VertexId> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) index.emplace(vertices[i], static_cast<VertexId>(i));
  std::vector<Endpoints> kept;
  for (const auto& [u, v] : edges_) {
    auto iu = index.find(u);
    auto iv = index.find(v);
    if (iu != index.end() && iv != index.end()) kept.push_back({iu->second, iv->second});
  }
  return Graph(vertices.size(), degree_bound_, kept);
}

std::optional<Incidence> OracleHandle::query(VertexId v, Port i) {
  if (v >= graph_->n()) throw BadEndpoint("oracle query on vertex " + std::to_string(v));
  if (i == 0 || i > graph_->d()) throw BadEndpoint("oracle query on port " + std::to_string(i));
  ++query_count_;
  if (trace_ != nullptr) trace_->push_back(v);
  return graph_->at_port(v, i);
}

const std::vector<std::pair<Port, Incidence>>& LocalView::incidences(VertexId v) {
  auto it = cache_.find(v);
  if (it != cache_.end()) return it->second;
  std::vector<std::pair<Port, Incidence>> list;
  const auto d = static_cast<Port>(oracle_->degree_bound());
  for (Port i = 1; i <= d; ++i) {
    ++queries_;
    if (auto inc = oracle_->query(v, i)) list.emplace_back(i, *inc);
  }
  return cache_.emplace(v, std::move(list)).first->second;
}

bool EdgeBall::contains_vertex(VertexId v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

EdgeBall explore_ball(PortOracle& oracle, const EdgeRef& center, std::size_t radius) {
  LocalView view(oracle);
  return explore_ball(view, center, radius);
}

EdgeBall explore_ball(LocalView& view, const EdgeRef& center, std::size_t radius) {
  const std::uint64_t before = view.queries_spent();
  EdgeBall ball;
  ball.center = center;
  ball.radius = radius;

  std::unordered_map<VertexId, std::size_t> dist;
  std::deque<VertexId> queue;
  for (VertexId s : {center.u, center.v}) {
    if (dist.emplace(s, 0).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    const VertexId x = queue.front();
    queue.pop_front();
    const std::size_t dx = dist.at(x);
    for (const auto& [port, inc] : view.incidences(x)) {
      if (dx < radius && dist.emplace(inc.neighbor, dx + 1).second) queue.push_back(inc.neighbor);
    }
  }

  ball.vertices.reserve(dist.size());
  for (const auto& [v, _] : dist) ball.vertices.push_back(v);
  std::sort(ball.vertices.begin(), ball.vertices.end());

  std::unordered_set<EdgeId> seen;
  for (VertexId x : ball.vertices) {
    for (const auto& [port, inc] : view.incidences(x)) {
      if (dist.contains(inc.neighbor) && seen.insert(inc.edge).second) {
        ball.edges.push_back({inc.edge, x, inc.neighbor});
      }
    }
  }
  std::sort(ball.edges.begin(), ball.edges.end(),
            [](const EdgeRef& a, const EdgeRef& b) { return a.id < b.id; });
  ball.queries_spent = view.queries_spent() - before;
  return ball;
}

Graph materialize_graph(PortOracle& oracle) {
  const std::size_t n = oracle.vertex_count();
  const auto d = static_cast<Port>(oracle.degree_bound());
  std::unordered_map<EdgeId, std::size_t> slot;
  std::vector<Endpoints> edges;
  for (VertexId v = 0; v < n; ++v) {
    for (Port i = 1; i <= d; ++i) {
      const auto inc = oracle.query(v, i);
      if (!inc) continue;
      if (slot.emplace(inc->edge, edges.size()).second) edges.push_back({v, inc->neighbor});
    }
  }
  return Graph(n, d, edges);
}

namespace {

bool parse_uint(std::string_view token, std::uint64_t& out) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Graph read_graph(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::vector<Endpoints> edges;
  std::vector<std::size_t> edge_lines;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() != 2) throw ParseError(line_no, "expected two integers");
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (!parse_uint(tokens[0], a) || !parse_uint(tokens[1], b)) {
      throw ParseError(line_no, "expected non-negative integers");
    }
    if (!have_header) {
      n = a;
      d = b;
      have_header = true;
    } else {
      if (a >= n || b >= n) throw ParseError(line_no, "endpoint out of range");
      edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b)});
      edge_lines.push_back(line_no);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(line_no, "missing \"n d\" header");

  // Re-run the degree check here so the error carries the offending line.
  std::vector<std::size_t> deg(n, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    deg[u] += 1;
    deg[v] += 1;
    if (deg[u] > d || deg[v] > d) {
      throw ParseError(edge_lines[i], "degree bound exceeded at vertex " +
                                          std::to_string(deg[u] > d ? u : v));
    }
  }
  return Graph(n, d, edges);
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return read_graph(buf.str());
}

std::string write_graph(const Graph& g) {
  std::string out = std::to_string(g.n()) + " " + std::to_string(g.d()) + "\n";
  for (const auto& [u, v] : g.edges()) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

}  // namespace sparsity
