#include "nscon/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stack>
#include <string>

#include "nscon/errors.hpp"

namespace nscon {

Digraph::Digraph(int n, double weight_floor)
    : n_(n), weight_floor_(weight_floor), adj_(n, n) {
  if (n <= 0) throw ConfigError("graph needs at least one node");
}

void Digraph::add_edge(int from, int to, double weight) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    throw ConfigError("edge endpoint out of range: " + std::to_string(from) + " -> " +
                      std::to_string(to));
  if (from == to) throw ConfigError("self-loops are not allowed");
  if (weight < 0.0) throw ConfigError("edge weights must be nonnegative");
  if (weight < weight_floor_) return;  // treated as absent
  adj_(to, from) = weight;
}

std::vector<int> Digraph::in_neighbors(int i) const {
  std::vector<int> r;
  for (int j = 0; j < n_; ++j)
    if (adj_(i, j) > 0.0) r.push_back(j);
  return r;
}

std::vector<int> Digraph::out_neighbors(int j) const {
  std::vector<int> r;
  for (int i = 0; i < n_; ++i)
    if (adj_(i, j) > 0.0) r.push_back(i);
  return r;
}

std::vector<Digraph::Edge> Digraph::edges() const {
  std::vector<Edge> r;
  for (int from = 0; from < n_; ++from)
    for (int to = 0; to < n_; ++to)
      if (adj_(to, from) > 0.0) r.push_back({from, to, adj_(to, from)});
  return r;
}

Mat build_laplacian(const Digraph& g) {
  const int n = g.size();
  Mat l(n, n);
  for (int i = 0; i < n; ++i) {
    double deg_in = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      deg_in += g.weight(i, j);
      l(i, j) = -g.weight(i, j);
    }
    l(i, i) = deg_in;
  }
  return l;
}

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g) {
  const int n = g.size();
  std::vector<std::vector<int>> succ(n);
  for (int j = 0; j < n; ++j) succ[j] = g.out_neighbors(j);

  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int next_index = 0;

  // Explicit DFS frames: (node, position in its successor list).
  struct Frame {
    int v;
    std::size_t child;
  };

  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> frames{{start, 0}};
    index[start] = lowlink[start] = next_index++;
    stack.push_back(start);
    on_stack[start] = true;

    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < succ[f.v].size()) {
        const int w = succ[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        const int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        if (lowlink[v] == index[v]) {
          std::vector<int> comp;
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          components.push_back(std::move(comp));
        }
      }
    }
  }
  return components;
}

namespace {

// Union-find for weak connectivity.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

Vec solve_perron(const Digraph& g) {
  const int n = g.size();
  const Mat l = build_laplacian(g);
  if (n == 1) return Vec{1.0};

  // sigma^T L = 0 with sigma_{n-1} pinned to 1; the remaining (n-1)-system
  // is the transpose of a principal Laplacian minor, invertible for a
  // strongly connected graph.
  Mat m(n - 1, n - 1);
  Vec rhs(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    for (int k = 0; k < n - 1; ++k) m(j, k) = l(k, j);
    rhs[j] = -l(n - 1, j);
  }
  auto tau = lu_solve(m, rhs);
  if (!tau) throw NotStronglyConnected("left Perron system is singular");

  Vec sigma(n);
  for (int i = 0; i < n - 1; ++i) sigma[i] = (*tau)[i];
  sigma[n - 1] = 1.0;

  double max_entry = 0.0;
  for (double s : sigma) {
    if (s <= 0.0) throw NotStronglyConnected("left Perron vector is not positive");
    max_entry = std::max(max_entry, s);
  }
  for (double& s : sigma) s /= max_entry;

  const Vec residual = matvec(l.transposed(), sigma);
  if (norm_inf(residual) > 1e-10 * std::max(1.0, norm_inf(l)))
    throw NotStronglyConnected("left Perron residual too large");
  return sigma;
}

}  // namespace

GraphFacts compute_facts(const Digraph& g) {
  const int n = g.size();
  GraphFacts facts;

  const auto components = strongly_connected_components(g);
  std::vector<int> comp_of(n, -1);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (int v : components[c]) comp_of[v] = static_cast<int>(c);

  // A component is a source iff no edge enters it from another component.
  std::vector<bool> has_incoming(components.size(), false);
  for (int j = 0; j < n; ++j)
    for (int i : g.out_neighbors(j))
      if (comp_of[j] != comp_of[i]) has_incoming[comp_of[i]] = true;

  std::vector<int> sources;
  for (std::size_t c = 0; c < components.size(); ++c)
    if (!has_incoming[c]) sources.push_back(static_cast<int>(c));

  if (sources.size() == 1) facts.roots = components[sources.front()];
  facts.has_spanning_tree = !facts.roots.empty();
  facts.strongly_connected = components.size() == 1;

  Dsu dsu(n);
  for (int j = 0; j < n; ++j)
    for (int i : g.out_neighbors(j)) dsu.unite(i, j);
  facts.weakly_connected = true;
  for (int v = 1; v < n; ++v)
    if (dsu.find(v) != dsu.find(0)) facts.weakly_connected = false;

  const Mat l = build_laplacian(g);
  const Vec col_sums = matvec(l.transposed(), Vec(n, 1.0));
  facts.balanced = norm_inf(col_sums) <= 1e-12 * std::max(1.0, norm_inf(l));

  facts.is_undirected = g.adjacency() == g.adjacency().transposed();

  if (facts.strongly_connected) facts.perron_left = solve_perron(g);
  return facts;
}

Vec perron_left_vector(const Digraph& g) {
  if (strongly_connected_components(g).size() != 1)
    throw NotStronglyConnected("graph is not strongly connected");
  return solve_perron(g);
}

}  // namespace nscon
