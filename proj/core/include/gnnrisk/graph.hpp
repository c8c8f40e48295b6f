#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnnrisk/types.hpp"

namespace gnnrisk {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Undirected simple graph. Edges are stored canonically (u < v) and sorted
/// lexicographically, so two graphs with the same edge set compare equal.
class Graph {
 public:
  Graph() = default;

  /// Validates and canonicalizes. Throws invalid-parameter on self-loops,
  /// duplicate edges (in either orientation) or out-of-range endpoints.
  Graph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::vector<std::size_t> degrees() const;
  Matrix adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Barabasi-Albert preferential attachment. The seed phase is `m` isolated
/// vertices; vertex m links to all of them, and every later vertex draws m
/// distinct targets from the repeated-endpoint list. Edge count is m(n-m).
Graph generate_ba(std::size_t n, std::size_t m, std::uint64_t seed);

/// Uniform-ish random k-regular graph by the pairing model with local
/// rejection of loops and multi-edges (Steger-Wormald style). Up to 1000
/// restarts before generation-failure.
Graph generate_regular(std::size_t n, std::size_t k, std::uint64_t seed);

inline constexpr int kRegularMaxRetries = 1000;

/// GCN propagation matrix D~^{-1/2} (A + I) D~^{-1/2}.
Matrix normalized_adjacency(const Graph& g);

enum class OperatorKind { NormalizedAdjacency, ShiftPsd, Squared, SgcPower };

std::string_view to_string(OperatorKind kind) noexcept;
OperatorKind parse_operator_kind(std::string_view name);

/// Whether the kind guarantees a positive semidefinite matrix.
bool is_psd_kind(OperatorKind kind) noexcept;

struct GraphOperator {
  Matrix matrix;
  OperatorKind kind = OperatorKind::ShiftPsd;
  int layers = 1;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// shift_psd: (I + A^)/2. squared: A^^2. sgc_power: ((I + A^)/2)^power.
/// normalized_adjacency: A^ itself, not PSD in general. `power` only
/// changes sgc_power but must be positive for every kind.
GraphOperator build_operator(const Graph& g, OperatorKind kind, int power = 1);

struct OperatorCheck {
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool symmetric = false;
  bool psd = false;
  bool norm_bounded = false;
};

/// Symmetry (1e-12), PSD (min eigenvalue >= -1e-10) and spectral norm
/// (<= 1 + 1e-10) checks. Costs one dense eigendecomposition.
OperatorCheck check_operator(const GraphOperator& op);

// Graph files. JSON: {"n": int, "edges": [[u, v], ...]} sorted. Text: one
// "u v" pair per line; '#' starts a comment; n is 1 + the largest endpoint
// unless the first non-comment line is a single integer.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(std::string_view text);
Graph graph_from_edge_list(std::string_view text);
void save_graph(const Graph& g, const std::filesystem::path& path);
/// Picks the parser from content: a leading '{' means JSON.
Graph load_graph(const std::filesystem::path& path);

}  // namespace gnnrisk
