#pragma once

// Dinic max-flow on real capacities, used for maximum-weight closure.

#include <cstddef>
#include <limits>
#include <vector>

namespace dyadic::detail {

class FlowNetwork {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  explicit FlowNetwork(std::size_t n, double eps) : adj_(n), level_(n), iter_(n), eps_(eps) {}

  void add_edge(std::size_t from, std::size_t to, double cap);
  double max_flow(std::size_t s, std::size_t t);
  /// Nodes reachable from s in the residual graph after max_flow: the minimal source side.
  std::vector<bool> source_side(std::size_t s) const;

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
  };
  bool bfs(std::size_t s, std::size_t t);
  double dfs(std::size_t v, std::size_t t, double pushed);

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  double eps_;
};

}  // namespace dyadic::detail
