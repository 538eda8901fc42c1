#include "sna/neural.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sna {

std::vector<int> Mlp::widths() const {
  std::vector<int> w{in_dim()};
  for (const auto& m : weights) w.push_back(static_cast<int>(m.rows()));
  return w;
}

Mlp Mlp::init(const std::vector<int>& layer_widths, Rng& rng, double out_scale) {
  if (layer_widths.size() < 2) throw std::invalid_argument("Mlp: need at least input and output");
  Mlp net;
  for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
    int in = layer_widths[l], out = layer_widths[l + 1];
    if (in <= 0 || out <= 0) throw std::invalid_argument("Mlp: widths must be positive");
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    if (l + 2 == layer_widths.size()) bound *= out_scale;
    Eigen::MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-bound, bound);
    Eigen::VectorXd b(out);
    for (int r = 0; r < out; ++r) b(r) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.dw.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.db.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

void MlpGrads::scale(double s) {
  for (auto& m : dw) m *= s;
  for (auto& v : db) v *= s;
}

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x, MlpCache* cache) {
  if (x.rows() != net.in_dim()) throw std::invalid_argument("mlp_forward: input dim mismatch");
  if (cache) {
    cache->input = x;
    cache->hidden.clear();
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Eigen::MatrixXd z = (net.weights[l] * h).colwise() + net.biases[l];
    if (l + 1 < net.weights.size()) {
      h = z.array().tanh();
      if (cache) cache->hidden.push_back(h);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Eigen::MatrixXd mlp_backward(const Mlp& net, const MlpCache& cache, const Eigen::MatrixXd& dout,
                             MlpGrads& grads) {
  const auto layers = net.weights.size();
  if (grads.dw.size() != layers) throw std::invalid_argument("mlp_backward: grads shape mismatch");
  Eigen::MatrixXd delta = dout;  // dL/dz of the current layer
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd& below = (l == 0) ? cache.input : cache.hidden[l - 1];
    grads.dw[l].noalias() += delta * below.transpose();
    grads.db[l] += delta.rowwise().sum();
    Eigen::MatrixXd dbelow = net.weights[l].transpose() * delta;
    if (l > 0) {
      // tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached
      delta = dbelow.array() * (1.0 - cache.hidden[l - 1].array().square());
    } else {
      return dbelow;
    }
  }
  return {};
}

AdamState AdamState::make(const Mlp& net, AdamConfig cfg) {
  AdamState s;
  s.cfg = cfg;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.mw.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.vw.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.mb.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    s.vb.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state) {
  if (grads.dw.size() != net.weights.size())
    throw std::invalid_argument("adam_step: grads shape mismatch");
  state.step += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.cfg.lr, eps = state.cfg.eps;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    state.mw[l] = b1 * state.mw[l] + (1.0 - b1) * grads.dw[l];
    state.vw[l] = b2 * state.vw[l].array() + (1.0 - b2) * grads.dw[l].array().square();
    net.weights[l].array() -=
        lr * (state.mw[l].array() / bc1) / ((state.vw[l].array() / bc2).sqrt() + eps);
    state.mb[l] = b1 * state.mb[l] + (1.0 - b1) * grads.db[l];
    state.vb[l] = b2 * state.vb[l].array() + (1.0 - b2) * grads.db[l].array().square();
    net.biases[l].array() -=
        lr * (state.mb[l].array() / bc1) / ((state.vb[l].array() / bc2).sqrt() + eps);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.weights.size() != online.weights.size())
    throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    if (target.weights[l].rows() != online.weights[l].rows() ||
        target.weights[l].cols() != online.weights[l].cols())
      throw std::invalid_argument("soft_update: shape mismatch");
    target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

GaussianPolicyHead GaussianPolicyHead::init(int obs_dim, const std::vector<int>& hidden,
                                            int act_dim, Rng& rng) {
  std::vector<int> widths{obs_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2 * act_dim);
  GaussianPolicyHead head;
  // Small final layer keeps initial actions near mid-range.
  head.trunk = Mlp::init(widths, rng, 0.01);
  head.act_dim = act_dim;
  return head;
}

PolicySample policy_sample(const GaussianPolicyHead& head, const Eigen::MatrixXd& obs,
                           const Eigen::MatrixXd& eps) {
  const int d = head.act_dim;
  const auto batch = obs.cols();
  if (eps.rows() != d || eps.cols() != batch)
    throw std::invalid_argument("policy_sample: eps shape mismatch");
  PolicySample s;
  Eigen::MatrixXd out = mlp_forward(head.trunk, obs, &s.trunk_cache);
  s.mu = out.topRows(d);
  Eigen::MatrixXd raw = out.bottomRows(d);
  s.clamp_mask = ((raw.array() > kLogSigmaMin) && (raw.array() < kLogSigmaMax)).cast<double>();
  s.log_sigma = raw.array().max(kLogSigmaMin).min(kLogSigmaMax);
  s.sigma = s.log_sigma.array().exp();
  s.eps = eps;
  Eigen::MatrixXd pre_tanh = s.mu + s.sigma.cwiseProduct(eps);
  s.action = pre_tanh.array().tanh();

  // Gaussian log-density of the pre-tanh value, minus the tanh
  // change-of-variables correction.
  const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
  Eigen::ArrayXXd per_dim = -0.5 * eps.array().square() - s.log_sigma.array() - half_log_2pi -
                            (1.0 - s.action.array().square() + kTanhEps).log();
  s.log_prob = per_dim.colwise().sum();
  return s;
}

void policy_backward(const GaussianPolicyHead& head, const PolicySample& s,
                     const Eigen::MatrixXd& d_action, const Eigen::RowVectorXd& d_log_prob,
                     MlpGrads& trunk_grads) {
  const int d = head.act_dim;
  const auto batch = s.action.cols();
  // log_prob contributes to d(action) via the tanh correction and to
  // d(log_sigma) directly (the -log sigma term).
  Eigen::ArrayXXd dlp = d_log_prob.replicate(d, 1).array();
  Eigen::ArrayXXd da =
      d_action.array() + dlp * (2.0 * s.action.array() / (1.0 - s.action.array().square() + kTanhEps));
  Eigen::ArrayXXd du = da * (1.0 - s.action.array().square());
  Eigen::ArrayXXd dmu = du;
  Eigen::ArrayXXd dls = (du * s.sigma.array() * s.eps.array() - dlp) * s.clamp_mask.array();
  Eigen::MatrixXd dout(2 * d, batch);
  dout.topRows(d) = dmu.matrix();
  dout.bottomRows(d) = dls.matrix();
  mlp_backward(head.trunk, s.trunk_cache, dout, trunk_grads);
}

namespace {
constexpr std::uint32_t kMagic = 0x54454E53u;  // "SNET" little-endian
constexpr std::uint32_t kVersion = 1u;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}
}  // namespace

void save_mlp(const Mlp& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  write_pod(out, kMagic);
  write_pod(out, kVersion);
  auto widths = net.widths();
  write_pod(out, static_cast<std::uint32_t>(widths.size()));
  for (int w : widths) write_pod(out, static_cast<std::uint32_t>(w));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    // row-major emission, independent of Eigen's internal layout
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) write_pod(out, w(r, c));
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) write_pod(out, net.biases[l](r));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Mlp load_mlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  if (read_pod<std::uint32_t>(in) != kMagic) throw std::runtime_error("checkpoint: bad magic");
  if (read_pod<std::uint32_t>(in) != kVersion) throw std::runtime_error("checkpoint: bad version");
  auto n_widths = read_pod<std::uint32_t>(in);
  if (n_widths < 2 || n_widths > 64) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<int> widths(n_widths);
  for (auto& w : widths) w = static_cast<int>(read_pod<std::uint32_t>(in));
  Mlp net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Eigen::MatrixXd w(widths[l + 1], widths[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_pod<double>(in);
    Eigen::VectorXd b(widths[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = read_pod<double>(in);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace sna
