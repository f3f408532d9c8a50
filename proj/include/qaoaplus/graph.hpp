#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qaoaplus/random.hpp"

namespace qaoaplus {

// Undirected edge, always stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Simple undirected graph on at most 64 nodes. Edges are canonicalized on
// construction (u < v, sorted lexicographically); self-loops and duplicate
// edges are rejected.
class Graph {
 public:
  static constexpr int kMaxNodes = 64;

  Graph(int num_nodes, std::vector<Edge> edges);

  int num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Hex FNV-1a hash of the sorted edge list. Equal for equal edge sets, not
  // an isomorphism invariant.
  const std::string& id() const { return id_; }

  std::vector<int> degrees() const;
  // Neighbor bitmask per node.
  std::vector<std::uint64_t> adjacency_masks() const;
  bool is_connected() const;
  bool is_regular(int degree) const;

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::string id_;
};

// Cut table entry type; large enough for every simple graph with n <= 24.
using CutTable = std::vector<std::uint16_t>;

inline constexpr int kMaxBruteForceNodes = 24;

struct CutSolution {
  int cmax = 0;
  // Bit j is the side of node j.
  std::uint64_t witness = 0;
};

// Number of edges whose endpoints land on different sides. Bit j of
// `assignment` is the side of node j.
int cut_value(const Graph& g, std::uint64_t assignment);

// Same, with the assignment given as a string of '0'/'1' where character j
// is the side of node j. Throws InputError on a length mismatch or a
// character other than '0'/'1'.
int cut_value(const Graph& g, std::string_view assignment);

// Entry x is cut_value(g, x) for every x in [0, 2^n). Throws CapacityError
// when n exceeds kMaxBruteForceNodes.
CutTable cut_table(const Graph& g);

// Exact maximum cut by exhaustive scan over half the assignments (the other
// half are bit-flip mirrors). Throws CapacityError above kMaxBruteForceNodes.
CutSolution max_cut_bruteforce(const Graph& g);

inline constexpr int kRegularGraphRetryBudget = 10'000;
inline constexpr int kNonisomorphicDrawBudget = 100'000;

// Uniform simple connected d-regular graph via the pairing model with
// whole-sample rejection. Throws InputError when n*d is odd or d >= n, and
// GenerationError when no acceptable pairing is found within the retry
// budget.
Graph sample_regular_graph(int n, int d, Rng& rng);

// Exact isomorphism test (invariant pre-filter plus backtracking).
bool are_isomorphic(const Graph& a, const Graph& b);

// Draws regular graphs until `max_count` pairwise non-isomorphic ones are
// found or `draw_budget` draws have been spent. May return fewer than
// `max_count` when the family is smaller than that.
std::vector<Graph> collect_nonisomorphic(int n, int d, int max_count, Rng& rng,
                                         int draw_budget = kNonisomorphicDrawBudget);

// Graph file format: {"n": <int>, "edges": [[u, v], ...]}; ensembles are a
// JSON array of such objects. Parsing is strict: edges must already be
// sorted with u < v and free of loops and duplicates.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);
nlohmann::json ensemble_to_json(const std::vector<Graph>& graphs);
std::vector<Graph> ensemble_from_json(const nlohmann::json& j);

void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs);
// Accepts either a single graph object or an array of them.
std::vector<Graph> read_graphs(const std::filesystem::path& path);

}  // namespace qaoaplus
