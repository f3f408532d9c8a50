#include "qaoaplus/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qaoaplus/error.hpp"

namespace qaoaplus {

namespace {

std::string hash_edges(int n, const std::vector<Edge>& edges) {
  std::string bytes = std::to_string(n) + ":";
  for (const auto& e : edges) {
    bytes += std::to_string(e.u) + "-" + std::to_string(e.v) + ",";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void require_brute_force_size(const Graph& g) {
  if (g.num_nodes() > kMaxBruteForceNodes) {
    throw CapacityError("graph has " + std::to_string(g.num_nodes()) +
                        " nodes; exhaustive cut evaluation supports at most " +
                        std::to_string(kMaxBruteForceNodes));
  }
}

}  // namespace

Graph::Graph(int num_nodes, std::vector<Edge> edges)
    : n_(num_nodes), edges_(std::move(edges)) {
  if (n_ < 1 || n_ > kMaxNodes) {
    throw InputError("node count must be in [1, " + std::to_string(kMaxNodes) +
                     "], got " + std::to_string(n_));
  }
  for (auto& e : edges_) {
    if (e.u == e.v) {
      throw InputError("self-loop on node " + std::to_string(e.u));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= n_) {
      throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") out of range for n=" + std::to_string(n_));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw InputError("duplicate edge");
  }
  id_ = hash_edges(n_, edges_);
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<std::uint64_t> Graph::adjacency_masks() const {
  std::vector<std::uint64_t> adj(n_, 0);
  for (const auto& e : edges_) {
    adj[e.u] |= std::uint64_t{1} << e.v;
    adj[e.v] |= std::uint64_t{1} << e.u;
  }
  return adj;
}

bool Graph::is_connected() const {
  const auto adj = adjacency_masks();
  std::uint64_t seen = 1;
  std::uint64_t frontier = 1;
  while (frontier != 0) {
    std::uint64_t next = 0;
    for (std::uint64_t f = frontier; f != 0; f &= f - 1) {
      next |= adj[std::countr_zero(f)];
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return std::popcount(seen) == n_;
}

bool Graph::is_regular(int degree) const {
  const auto deg = degrees();
  return std::all_of(deg.begin(), deg.end(), [&](int d) { return d == degree; });
}

int cut_value(const Graph& g, std::uint64_t assignment) {
  int cut = 0;
  for (const auto& e : g.edges()) {
    cut += static_cast<int>(((assignment >> e.u) ^ (assignment >> e.v)) & 1U);
  }
  return cut;
}

int cut_value(const Graph& g, std::string_view assignment) {
  if (assignment.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw InputError("assignment has " + std::to_string(assignment.size()) +
                     " bits, graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    if (assignment[j] == '1') {
      bits |= std::uint64_t{1} << j;
    } else if (assignment[j] != '0') {
      throw InputError("assignment must contain only '0' and '1'");
    }
  }
  return cut_value(g, bits);
}

CutTable cut_table(const Graph& g) {
  require_brute_force_size(g);
  const std::uint64_t dim = std::uint64_t{1} << g.num_nodes();
  CutTable table(dim, 0);
  // Each edge contributes 1 on every index whose bits u and v differ.
  for (const auto& e : g.edges()) {
    for (std::uint64_t x = 0; x < dim; ++x) {
      table[x] += static_cast<std::uint16_t>(((x >> e.u) ^ (x >> e.v)) & 1U);
    }
  }
  return table;
}

CutSolution max_cut_bruteforce(const Graph& g) {
  require_brute_force_size(g);
  // Fixing the top node's side halves the scan; the mirror has equal cut.
  const std::uint64_t half = std::uint64_t{1} << (g.num_nodes() - 1);
  CutSolution best;
  for (std::uint64_t x = 0; x < half; ++x) {
    const int c = cut_value(g, x);
    if (c > best.cmax) {
      best.cmax = c;
      best.witness = x;
    }
  }
  return best;
}

Graph sample_regular_graph(int n, int d, Rng& rng) {
  if (n < 1 || d < 0) {
    throw InputError("regular graph requires n >= 1 and d >= 0");
  }
  if (d >= n) {
    throw InputError("degree " + std::to_string(d) + " must be below node count " +
                     std::to_string(n));
  }
  if ((n * d) % 2 != 0) {
    throw InputError("n*d must be even (n=" + std::to_string(n) +
                     ", d=" + std::to_string(d) + ")");
  }
  if (n > Graph::kMaxNodes) {
    throw InputError("node count above " + std::to_string(Graph::kMaxNodes));
  }

  // Complementation is a bijection between simple d-regular and simple
  // (n-1-d)-regular graphs, so sampling the sparser side and complementing
  // keeps the distribution uniform while raising the pairing acceptance rate.
  const bool via_complement = n - 1 - d < d;
  const int k = via_complement ? n - 1 - d : d;
  const int num_points = n * k;
  std::vector<int> points(num_points);
  std::vector<std::uint64_t> adj(n);
  std::vector<Edge> edges;
  edges.reserve(n * d / 2);

  for (int attempt = 0; attempt < kRegularGraphRetryBudget; ++attempt) {
    for (int i = 0; i < num_points; ++i) points[i] = i / k;
    std::fill(adj.begin(), adj.end(), 0);
    edges.clear();

    // Uniform random perfect matching of the points, built pair by pair so a
    // loop or multi-edge rejects the sample as soon as it appears.
    bool simple = true;
    for (int i = 0; i < num_points; i += 2) {
      const int j = i + 1 + static_cast<int>(uniform_index(rng, num_points - i - 1));
      std::swap(points[i + 1], points[j]);
      const int a = points[i];
      const int b = points[i + 1];
      if (a == b || ((adj[a] >> b) & 1U)) {
        simple = false;
        break;
      }
      adj[a] |= std::uint64_t{1} << b;
      adj[b] |= std::uint64_t{1} << a;
    }
    if (!simple) continue;

    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if ((((adj[a] >> b) & 1U) != 0) != via_complement) edges.push_back({a, b});
      }
    }
    Graph g(n, edges);
    if (g.is_connected()) return g;
  }
  throw GenerationError("no simple connected " + std::to_string(d) + "-regular graph on " +
                        std::to_string(n) + " nodes after " +
                        std::to_string(kRegularGraphRetryBudget) + " attempts");
}

namespace {

// Per-vertex isomorphism invariant: degree, sorted neighbor degrees, number
// of triangles through the vertex, and BFS layer sizes.
using VertexSignature = std::vector<int>;

class IsoIndex {
 public:
  explicit IsoIndex(const Graph& g) : n_(g.num_nodes()), adj_(g.adjacency_masks()) {
    const auto deg = g.degrees();
    signature_.resize(n_);
    for (int v = 0; v < n_; ++v) {
      auto& sig = signature_[v];
      sig.push_back(deg[v]);
      std::vector<int> nd;
      int triangles = 0;
      for (std::uint64_t m = adj_[v]; m != 0; m &= m - 1) {
        const int w = std::countr_zero(m);
        nd.push_back(deg[w]);
        triangles += std::popcount(adj_[w] & adj_[v]);
      }
      std::sort(nd.begin(), nd.end());
      sig.insert(sig.end(), nd.begin(), nd.end());
      sig.push_back(-1);
      sig.push_back(triangles / 2);
      std::uint64_t seen = std::uint64_t{1} << v;
      std::uint64_t frontier = seen;
      while (frontier != 0) {
        std::uint64_t next = 0;
        for (std::uint64_t f = frontier; f != 0; f &= f - 1) {
          next |= adj_[std::countr_zero(f)];
        }
        frontier = next & ~seen;
        seen |= next;
        sig.push_back(std::popcount(frontier));
      }
    }
    sorted_ = signature_;
    std::sort(sorted_.begin(), sorted_.end());
  }

  int n_;
  std::vector<std::uint64_t> adj_;
  std::vector<VertexSignature> signature_;
  std::vector<VertexSignature> sorted_;
};

class Matcher {
 public:
  Matcher(const IsoIndex& a, const IsoIndex& b) : a_(a), b_(b) {
    // Map vertices of `a` in BFS order from its rarest signature so each new
    // vertex is adjacent to an already-mapped one whenever possible.
    const int n = a_.n_;
    std::vector<int> rarity(n);
    for (int v = 0; v < n; ++v) {
      rarity[v] = static_cast<int>(
          std::count(a_.signature_.begin(), a_.signature_.end(), a_.signature_[v]));
    }
    std::uint64_t placed = 0;
    while (static_cast<int>(order_.size()) < n) {
      int root = -1;
      for (int v = 0; v < n; ++v) {
        if (((placed >> v) & 1U) == 0 && (root < 0 || rarity[v] < rarity[root])) root = v;
      }
      std::vector<int> queue{root};
      placed |= std::uint64_t{1} << root;
      for (std::size_t i = 0; i < queue.size(); ++i) {
        order_.push_back(queue[i]);
        for (std::uint64_t m = a_.adj_[queue[i]] & ~placed; m != 0; m &= m - 1) {
          const int w = std::countr_zero(m);
          placed |= std::uint64_t{1} << w;
          queue.push_back(w);
        }
      }
    }
    map_.assign(n, -1);
  }

  bool run() { return extend(0, 0); }

 private:
  bool extend(std::size_t depth, std::uint64_t used) {
    if (depth == order_.size()) return true;
    const int v = order_[depth];
    for (int c = 0; c < b_.n_; ++c) {
      if ((used >> c) & 1U) continue;
      if (a_.signature_[v] != b_.signature_[c]) continue;
      bool consistent = true;
      for (std::size_t k = 0; k < depth && consistent; ++k) {
        const int w = order_[k];
        const bool edge_a = (a_.adj_[v] >> w) & 1U;
        const bool edge_b = (b_.adj_[c] >> map_[w]) & 1U;
        consistent = edge_a == edge_b;
      }
      if (!consistent) continue;
      map_[v] = c;
      if (extend(depth + 1, used | (std::uint64_t{1} << c))) return true;
      map_[v] = -1;
    }
    return false;
  }

  const IsoIndex& a_;
  const IsoIndex& b_;
  std::vector<int> order_;
  std::vector<int> map_;
};

bool isomorphic(const IsoIndex& a, const IsoIndex& b) {
  if (a.n_ != b.n_ || a.sorted_ != b.sorted_) return false;
  return Matcher(a, b).run();
}

}  // namespace

bool are_isomorphic(const Graph& a, const Graph& b) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
  auto da = a.degrees();
  auto db = b.degrees();
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;
  return isomorphic(IsoIndex(a), IsoIndex(b));
}

std::vector<Graph> collect_nonisomorphic(int n, int d, int max_count, Rng& rng,
                                         int draw_budget) {
  if (max_count < 1) throw InputError("max_count must be positive");
  std::vector<Graph> kept;
  std::vector<IsoIndex> kept_index;
  for (int draw = 0; draw < draw_budget && static_cast<int>(kept.size()) < max_count;
       ++draw) {
    Graph g = sample_regular_graph(n, d, rng);
    IsoIndex index(g);
    const bool seen = std::any_of(kept_index.begin(), kept_index.end(),
                                  [&](const IsoIndex& k) { return isomorphic(k, index); });
    if (!seen) {
      kept.push_back(std::move(g));
      kept_index.push_back(std::move(index));
    }
  }
  return kept;
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  return {{"n", g.num_nodes()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw InputError("graph object must have fields \"n\" and \"edges\"");
  }
  if (!j.at("n").is_number_integer() || !j.at("edges").is_array()) {
    throw InputError("graph \"n\" must be an integer and \"edges\" an array");
  }
  const int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& pair : j.at("edges")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw InputError("each edge must be a pair of integers");
    }
    Edge e{pair[0].get<int>(), pair[1].get<int>()};
    if (e.u >= e.v) {
      throw InputError("edge [" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       "] violates u < v");
    }
    if (!edges.empty() && !(edges.back() < e)) {
      throw InputError("edges must be sorted and free of duplicates");
    }
    edges.push_back(e);
  }
  return Graph(n, std::move(edges));
}

nlohmann::json ensemble_to_json(const std::vector<Graph>& graphs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : graphs) out.push_back(graph_to_json(g));
  return out;
}

std::vector<Graph> ensemble_from_json(const nlohmann::json& j) {
  std::vector<Graph> graphs;
  if (j.is_object()) {
    graphs.push_back(graph_from_json(j));
    return graphs;
  }
  if (!j.is_array()) throw InputError("graph file must hold an object or an array");
  for (const auto& item : j) graphs.push_back(graph_from_json(item));
  return graphs;
}

void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << ensemble_to_json(graphs).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Graph> read_graphs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return ensemble_from_json(j);
}

}  // namespace qaoaplus
