#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sna {

// Undirected agent graph. Invariants enforced at construction: no self
// loops, no duplicate edges, endpoints < n_agents. Immutable afterwards,
// so instances can be shared read-only across concurrent trainers.
class AgentGraph {
 public:
  AgentGraph(int n_agents, std::vector<std::pair<int, int>> edges);

  int n_agents() const { return n_agents_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  // Largest finite pairwise distance; components never see each other.
  int diameter() const;

  // FNV-1a over agent count and the canonical edge list; used to detect
  // checkpoint/environment mismatches.
  std::uint64_t hash() const;

 private:
  int n_agents_;
  std::vector<std::pair<int, int>> edges_;       // canonical (lo, hi), sorted
  std::vector<std::vector<int>> adjacency_;      // per-agent sorted neighbor lists
};

// kappa-hop neighborhoods (self included) and their complements, both in
// ascending agent order. The ascending order is the canonical layout for
// critic input vectors.
struct NeighborhoodIndex {
  int kappa = 0;
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<int>> complements;

  int n_agents() const { return static_cast<int>(neighbors.size()); }
};

NeighborhoodIndex khop_neighborhood(const AgentGraph& graph, int kappa);

// Full neighborhoods for every agent regardless of topology (crosses graph
// components); this is what centralized critics consume.
NeighborhoodIndex full_neighborhood(int n_agents);

// Per-agent observation/action sizing shared by environments and critics.
struct EnvSpec {
  int obs_dim = 9;
  int act_dim = 1;
  std::vector<std::pair<double, double>> action_bounds = {{0.8, 1.2}};

  void validate() const;
};

enum class CriticMode { kCtde, kSna };

int critic_input_dim(const NeighborhoodIndex& index, const EnvSpec& spec, int agent,
                     CriticMode mode);

// (maximum, mean) over agents of the sna-mode critic input dimension.
std::pair<int, double> max_and_avg_critic_dims(const NeighborhoodIndex& index,
                                               const EnvSpec& spec);

}  // namespace sna
