#include "gnnrisk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gnnrisk/error.hpp"
#include "gnnrisk/rng.hpp"
#include "gnnrisk/spectral.hpp"

namespace gnnrisk {

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges) : n_(vertex_count) {
  for (auto& [u, v] : edges) {
    require(u != v, ErrorKind::InvalidParameter,
            "graph: self-loop at vertex " + std::to_string(u));
    require(u < n_ && v < n_, ErrorKind::InvalidParameter,
            "graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                ") has an endpoint >= n = " + std::to_string(n_));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  require(dup == edges.end(), ErrorKind::InvalidParameter,
          dup == edges.end() ? std::string{}
                             : "graph: duplicate edge (" + std::to_string(dup->first) + ", " +
                                   std::to_string(dup->second) + ")");
  edges_ = std::move(edges);
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Matrix Graph::adjacency() const {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (const auto& [u, v] : edges_) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

Graph generate_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  require(m >= 1 && m < n, ErrorKind::InvalidParameter,
          "generate_ba: need 1 <= m < n (got n = " + std::to_string(n) +
              ", m = " + std::to_string(m) + ")");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(m * (n - m));

  std::vector<Vertex> targets(m);
  for (std::size_t i = 0; i < m; ++i) targets[i] = static_cast<Vertex>(i);
  // Each endpoint appears once per incident edge: sampling an entry
  // uniformly is sampling a vertex proportionally to its degree.
  std::vector<Vertex> repeated;
  repeated.reserve(2 * m * (n - m));

  for (auto source = static_cast<Vertex>(m); source < n; ++source) {
    for (Vertex t : targets) edges.emplace_back(t, source);
    repeated.insert(repeated.end(), targets.begin(), targets.end());
    repeated.insert(repeated.end(), m, source);
    if (source + 1 == n) break;

    targets.clear();
    while (targets.size() < m) {
      const Vertex pick = repeated[rng.below(repeated.size())];
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
        targets.push_back(pick);
      }
    }
  }
  return Graph(n, std::move(edges));
}

namespace {

// One pairing attempt. Returns false when the leftover stubs can no longer
// be matched into new simple edges.
bool try_regular(std::size_t n, std::size_t k, Rng& rng, std::set<Edge>& edges) {
  edges.clear();
  std::vector<Vertex> stubs;
  stubs.reserve(n * k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t v = 0; v < n; ++v) stubs.push_back(static_cast<Vertex>(v));
  }

  while (!stubs.empty()) {
    std::map<Vertex, std::size_t> leftover;
    rng.shuffle(std::span<Vertex>(stubs));
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      Vertex a = stubs[i];
      Vertex b = stubs[i + 1];
      if (a > b) std::swap(a, b);
      if (a != b && !edges.contains({a, b})) {
        edges.insert({a, b});
      } else {
        ++leftover[a];
        ++leftover[b];
      }
    }
    if (leftover.empty()) break;

    bool matchable = false;
    for (auto it = leftover.begin(); it != leftover.end() && !matchable; ++it) {
      for (auto jt = std::next(it); jt != leftover.end(); ++jt) {
        if (!edges.contains({it->first, jt->first})) {
          matchable = true;
          break;
        }
      }
    }
    if (!matchable) return false;

    stubs.clear();
    for (const auto& [v, count] : leftover) stubs.insert(stubs.end(), count, v);
  }
  return true;
}

}  // namespace

Graph generate_regular(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(n >= 1 && k < n, ErrorKind::InvalidParameter,
          "generate_regular: need 0 <= k < n (got n = " + std::to_string(n) +
              ", k = " + std::to_string(k) + ")");
  require((n * k) % 2 == 0, ErrorKind::InvalidParameter,
          "generate_regular: n*k must be even (got " + std::to_string(n * k) + ")");
  if (k == 0) return Graph(n, {});

  Rng rng(seed);
  std::set<Edge> edges;
  for (int attempt = 0; attempt < kRegularMaxRetries; ++attempt) {
    if (try_regular(n, k, rng, edges)) {
      return Graph(n, std::vector<Edge>(edges.begin(), edges.end()));
    }
  }
  fail(ErrorKind::GenerationFailure,
       "generate_regular: no simple " + std::to_string(k) + "-regular graph on " +
           std::to_string(n) + " vertices after " + std::to_string(kRegularMaxRetries) +
           " attempts");
}

Matrix normalized_adjacency(const Graph& g) {
  Matrix a = g.adjacency();
  a.diagonal().array() += 1.0;
  const Vector inv_sqrt = a.rowwise().sum().array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

std::string_view to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::NormalizedAdjacency: return "normalized_adjacency";
    case OperatorKind::ShiftPsd: return "shift_psd";
    case OperatorKind::Squared: return "squared";
    case OperatorKind::SgcPower: return "sgc_power";
  }
  return "unknown";
}

OperatorKind parse_operator_kind(std::string_view name) {
  for (auto kind : {OperatorKind::NormalizedAdjacency, OperatorKind::ShiftPsd,
                    OperatorKind::Squared, OperatorKind::SgcPower}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorKind::InvalidParameter, "unknown operator kind '" + std::string(name) + "'");
}

bool is_psd_kind(OperatorKind kind) noexcept {
  return kind != OperatorKind::NormalizedAdjacency;
}

GraphOperator build_operator(const Graph& g, OperatorKind kind, int power) {
  require(power >= 1, ErrorKind::InvalidParameter,
          "build_operator: power must be >= 1 (got " + std::to_string(power) + ")");
  const Matrix a_hat = normalized_adjacency(g);
  const auto n = a_hat.rows();

  GraphOperator op;
  op.kind = kind;
  switch (kind) {
    case OperatorKind::NormalizedAdjacency:
      op.matrix = a_hat;
      break;
    case OperatorKind::ShiftPsd:
      op.matrix = 0.5 * (Matrix::Identity(n, n) + a_hat);
      break;
    case OperatorKind::Squared:
      op.matrix = a_hat * a_hat;
      break;
    case OperatorKind::SgcPower: {
      const Matrix shifted = 0.5 * (Matrix::Identity(n, n) + a_hat);
      op.matrix = shifted;
      for (int i = 1; i < power; ++i) op.matrix = op.matrix * shifted;
      op.layers = power;
      break;
    }
    default:
      fail(ErrorKind::InvalidParameter, "build_operator: unknown operator kind");
  }
  // Products drift from exact symmetry by a few ulps.
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

OperatorCheck check_operator(const GraphOperator& op) {
  OperatorCheck check;
  check.max_asymmetry = (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff();
  check.symmetric = check.max_asymmetry <= 1e-12;
  const SpectralDecomposition dec = eigh_symmetric(op.matrix);
  check.max_eigenvalue = dec.eigenvalues[0];
  check.min_eigenvalue = dec.eigenvalues[dec.eigenvalues.size() - 1];
  check.psd = check.min_eigenvalue >= -1e-10;
  check.norm_bounded =
      std::max(std::abs(check.max_eigenvalue), std::abs(check.min_eigenvalue)) <= 1.0 + 1e-10;
  return check;
}

std::string graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  nlohmann::ordered_json out;
  out["n"] = g.vertex_count();
  out["edges"] = std::move(edges);
  return out.dump() + "\n";
}

Graph graph_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::IoError, std::string("graph JSON: ") + e.what());
  }
  require(doc.is_object() && doc.contains("n") && doc.contains("edges"), ErrorKind::IoError,
          "graph JSON: expected an object with keys 'n' and 'edges'");
  require(doc["n"].is_number_unsigned() || doc["n"].is_number_integer(), ErrorKind::IoError,
          "graph JSON: 'n' must be an integer");
  const auto n = doc["n"].get<std::int64_t>();
  require(n >= 0, ErrorKind::IoError, "graph JSON: 'n' must be non-negative");
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    require(e.is_array() && e.size() == 2 && e[0].is_number_integer() &&
                e[1].is_number_integer() && e[0].get<std::int64_t>() >= 0 &&
                e[1].get<std::int64_t>() >= 0,
            ErrorKind::IoError, "graph JSON: every edge must be a pair of non-negative integers");
    edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
  }
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

Graph graph_from_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Edge> edges;
  std::size_t n = 0;
  bool explicit_n = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<long long> values;
    long long x = 0;
    while (fields >> x) values.push_back(x);
    require(fields.eof(), ErrorKind::IoError, "edge list: non-integer token in line '" + line + "'");
    if (values.empty()) continue;
    if (first && values.size() == 1) {
      require(values[0] >= 0, ErrorKind::IoError, "edge list: vertex count must be non-negative");
      n = static_cast<std::size_t>(values[0]);
      explicit_n = true;
      first = false;
      continue;
    }
    first = false;
    require(values.size() == 2 && values[0] >= 0 && values[1] >= 0, ErrorKind::IoError,
            "edge list: expected 'u v' per line, got '" + line + "'");
    edges.emplace_back(static_cast<Vertex>(values[0]), static_cast<Vertex>(values[1]));
    if (!explicit_n) {
      n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(values[0], values[1])) + 1);
    }
  }
  return Graph(n, std::move(edges));
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out << graph_to_json(g);
  require(static_cast<bool>(out), ErrorKind::IoError, "write failed: " + path.string());
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') return graph_from_json(text);
  return graph_from_edge_list(text);
}

}  // namespace gnnrisk
