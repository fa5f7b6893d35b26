#include "maxflow.hpp"

#include <algorithm>
#include <queue>

namespace dyadic::detail {

void FlowNetwork::add_edge(std::size_t from, std::size_t to, double cap) {
  adj_[from].push_back({to, adj_[to].size(), cap});
  adj_[to].push_back({from, adj_[from].size() - 1, 0.0});
}

bool FlowNetwork::bfs(std::size_t s, std::size_t t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (const auto& e : adj_[v]) {
      if (e.cap > eps_ && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[t] >= 0;
}

double FlowNetwork::dfs(std::size_t v, std::size_t t, double pushed) {
  if (v == t) return pushed;
  for (auto& i = iter_[v]; i < adj_[v].size(); ++i) {
    Edge& e = adj_[v][i];
    if (e.cap <= eps_ || level_[e.to] != level_[v] + 1) continue;
    const double got = dfs(e.to, t, std::min(pushed, e.cap));
    if (got > 0.0) {
      e.cap -= got;
      adj_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double FlowNetwork::max_flow(std::size_t s, std::size_t t) {
  double flow = 0.0;
  while (bfs(s, t)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    while (true) {
      const double f = dfs(s, t, kInf);
      if (f <= 0.0) break;
      flow += f;
    }
  }
  return flow;
}

std::vector<bool> FlowNetwork::source_side(std::size_t s) const {
  std::vector<bool> seen(adj_.size(), false);
  std::vector<std::size_t> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& e : adj_[v])
      if (e.cap > eps_ && !seen[e.to]) {
        seen[e.to] = true;
        stack.push_back(e.to);
      }
  }
  return seen;
}

}  // namespace dyadic::detail
