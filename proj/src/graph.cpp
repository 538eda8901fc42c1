#include "sna/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace sna {

AgentGraph::AgentGraph(int n_agents, std::vector<std::pair<int, int>> edges)
    : n_agents_(n_agents) {
  if (n_agents <= 0) throw std::invalid_argument("AgentGraph: n_agents must be positive");
  std::set<std::pair<int, int>> canon;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("AgentGraph: self loop");
    if (a < 0 || b < 0 || a >= n_agents || b >= n_agents)
      throw std::invalid_argument("AgentGraph: edge endpoint out of range");
    canon.emplace(std::min(a, b), std::max(a, b));
  }
  edges_.assign(canon.begin(), canon.end());
  adjacency_.assign(n_agents, {});
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

int AgentGraph::diameter() const {
  int best = 0;
  std::vector<int> dist(n_agents_);
  for (int src = 0; src < n_agents_; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      best = std::max(best, dist[u]);
      for (int v : adjacency_[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return best;
}

std::uint64_t AgentGraph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(n_agents_));
  for (auto [a, b] : edges_) {
    mix(static_cast<std::uint64_t>(a));
    mix(static_cast<std::uint64_t>(b));
  }
  return h;
}

NeighborhoodIndex khop_neighborhood(const AgentGraph& graph, int kappa) {
  if (kappa < 0) throw std::invalid_argument("khop_neighborhood: kappa must be >= 0");
  const int n = graph.n_agents();
  NeighborhoodIndex index;
  index.kappa = kappa;
  index.neighbors.resize(n);
  index.complements.resize(n);
  std::vector<int> dist(n);
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (dist[u] == kappa) continue;  // frontier reached the hop budget
      for (int v : graph.adjacency()[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (dist[v] >= 0 && dist[v] <= kappa)
        index.neighbors[src].push_back(v);
      else
        index.complements[src].push_back(v);
    }
  }
  return index;
}

NeighborhoodIndex full_neighborhood(int n_agents) {
  NeighborhoodIndex index;
  index.kappa = n_agents;  // nominal; every set is already saturated
  index.neighbors.resize(n_agents);
  index.complements.resize(n_agents);
  for (int i = 0; i < n_agents; ++i)
    for (int v = 0; v < n_agents; ++v) index.neighbors[i].push_back(v);
  return index;
}

void EnvSpec::validate() const {
  if (obs_dim <= 0 || act_dim <= 0) throw std::invalid_argument("EnvSpec: dims must be positive");
  if (static_cast<int>(action_bounds.size()) != act_dim)
    throw std::invalid_argument("EnvSpec: one bound interval per action dimension");
  for (auto [lo, hi] : action_bounds)
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi)
      throw std::invalid_argument("EnvSpec: bounds must be finite with lower < upper");
}

int critic_input_dim(const NeighborhoodIndex& index, const EnvSpec& spec, int agent,
                     CriticMode mode) {
  if (agent < 0 || agent >= index.n_agents())
    throw std::out_of_range("critic_input_dim: agent out of range");
  const int per_agent = spec.obs_dim + spec.act_dim;
  if (mode == CriticMode::kCtde) return index.n_agents() * per_agent;
  return static_cast<int>(index.neighbors[agent].size()) * per_agent;
}

std::pair<int, double> max_and_avg_critic_dims(const NeighborhoodIndex& index,
                                               const EnvSpec& spec) {
  int max_dim = 0;
  double sum = 0.0;
  for (int i = 0; i < index.n_agents(); ++i) {
    int d = critic_input_dim(index, spec, i, CriticMode::kSna);
    max_dim = std::max(max_dim, d);
    sum += d;
  }
  return {max_dim, sum / static_cast<double>(index.n_agents())};
}

}  // namespace sna
