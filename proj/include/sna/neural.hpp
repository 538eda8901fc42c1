#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sna/rng.hpp"

namespace sna {

// Dense feed-forward net: tanh on hidden layers, identity output. Weights
// are (out x in); batches are matrices whose columns are samples.
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int in_dim() const { return static_cast<int>(weights.front().cols()); }
  int out_dim() const { return static_cast<int>(weights.back().rows()); }
  std::size_t n_layers() const { return weights.size(); }
  std::vector<int> widths() const;

  // Uniform fan-in init U(-1/sqrt(in), 1/sqrt(in)); the last layer is
  // additionally scaled by out_scale.
  static Mlp init(const std::vector<int>& layer_widths, Rng& rng, double out_scale = 1.0);
};

struct MlpCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> hidden;  // post-tanh activations per hidden layer
};

struct MlpGrads {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;

  static MlpGrads zeros_like(const Mlp& net);
  void scale(double s);
};

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x, MlpCache* cache = nullptr);

// Reverse-mode pass; `dout` is dL/d(output). Accumulates parameter grads
// into `grads` and returns dL/d(input).
Eigen::MatrixXd mlp_backward(const Mlp& net, const MlpCache& cache, const Eigen::MatrixXd& dout,
                             MlpGrads& grads);

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  long step = 0;
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;

  static AdamState make(const Mlp& net, AdamConfig cfg);
};

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state);

// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

// Squashed-Gaussian policy: the trunk emits (mu, log_sigma) per action
// dimension; actions are tanh(mu + sigma*eps).
struct GaussianPolicyHead {
  Mlp trunk;
  int act_dim = 1;

  int obs_dim() const { return trunk.in_dim(); }
  static GaussianPolicyHead init(int obs_dim, const std::vector<int>& hidden, int act_dim,
                                 Rng& rng);
};

constexpr double kLogSigmaMin = -20.0;
constexpr double kLogSigmaMax = 2.0;
constexpr double kTanhEps = 1e-6;

struct PolicySample {
  Eigen::MatrixXd action;      // act_dim x B, strictly inside (-1, 1)
  Eigen::RowVectorXd log_prob; // 1 x B
  // cached intermediates for the reparameterized backward pass
  MlpCache trunk_cache;
  Eigen::MatrixXd mu, log_sigma, sigma, eps;
  Eigen::MatrixXd clamp_mask;  // 1 where log_sigma was inside the clamp range
};

// eps is act_dim x B of standard normal draws (zero for the deterministic
// mean action).
PolicySample policy_sample(const GaussianPolicyHead& head, const Eigen::MatrixXd& obs,
                           const Eigen::MatrixXd& eps);

// Accumulates trunk gradients for an objective with upstream d(action) and
// d(log_prob), keeping eps frozen (reparameterization path).
void policy_backward(const GaussianPolicyHead& head, const PolicySample& sample,
                     const Eigen::MatrixXd& d_action, const Eigen::RowVectorXd& d_log_prob,
                     MlpGrads& trunk_grads);

// Binary little-endian checkpoint: magic 'SNET', u32 version, u32 layer
// count, u32 widths, then per layer row-major weight doubles and bias
// doubles.
void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

}  // namespace sna
