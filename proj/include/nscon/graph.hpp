#pragma once

#include <optional>
#include <vector>

#include "nscon/linalg.hpp"

namespace nscon {

/// Weighted directed graph on nodes 0..n-1.
///
/// Convention: weight(i, j) = a_ij > 0 means information flows from node j
/// into node i (there is an edge j -> i). add_edge takes the edge direction
/// (from, to), i.e. add_edge(j, i, w) sets a_ij = w.
class Digraph {
 public:
  explicit Digraph(int n, double weight_floor = 1e-12);

  /// Adds edge from -> to. Weights below the floor are treated as absent.
  /// Throws ConfigError on self-loops, negative weights, or bad indices.
  void add_edge(int from, int to, double weight);

  int size() const { return n_; }
  double weight(int i, int j) const { return adj_(i, j); }  // a_ij
  const Mat& adjacency() const { return adj_; }
  double weight_floor() const { return weight_floor_; }

  /// Nodes j with an edge j -> i (the in-neighborhood of i).
  std::vector<int> in_neighbors(int i) const;
  /// Nodes i with an edge j -> i (successors of j).
  std::vector<int> out_neighbors(int j) const;

  /// Edge list in (from, to, weight) form, ordered by (from, to).
  struct Edge {
    int from, to;
    double weight;
  };
  std::vector<Edge> edges() const;

  bool operator==(const Digraph& other) const = default;

 private:
  int n_;
  double weight_floor_;
  Mat adj_;
};

/// Structural facts a consensus theorem can be gated on.
struct GraphFacts {
  std::vector<int> roots;  // nodes with a directed path to every node, sorted
  bool strongly_connected = false;
  bool weakly_connected = false;
  bool has_spanning_tree = false;  // equivalent to !roots.empty()
  bool balanced = false;           // in-degree == out-degree everywhere
  bool is_undirected = false;
  std::optional<Vec> perron_left;  // sigma > 0 with sigma^T L = 0, max entry 1
};

/// L = Delta - A with Delta the in-degree diagonal. Row sums are exactly zero.
Mat build_laplacian(const Digraph& g);

/// Root set via SCC condensation (roots exist iff the condensation has a
/// unique source component), plus connectivity/balance flags and, when the
/// graph is strongly connected, the left Perron vector.
GraphFacts compute_facts(const Digraph& g);

/// Positive sigma with sigma^T L = 0, normalized so max sigma_i = 1.
/// Throws NotStronglyConnected otherwise.
Vec perron_left_vector(const Digraph& g);

/// Strongly connected components in Tarjan order (iterative).
std::vector<std::vector<int>> strongly_connected_components(const Digraph& g);

}  // namespace nscon
