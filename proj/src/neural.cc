#include "edge_forge/neural.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "edge_forge/errors.h"

namespace edge_forge {

namespace {

void check_batch(const Mlp& net, const Batch& batch) {
  const std::size_t n = batch.targets.size();
  if (n == 0) throw UsageError("empty training batch");
  if (batch.actions.size() != n) {
    throw UsageError("batch has " + std::to_string(n) + " targets but " +
                     std::to_string(batch.actions.size()) + " actions");
  }
  if (batch.inputs.size() != n * net.input_dim()) {
    throw UsageError("batch inputs size " +
                     std::to_string(batch.inputs.size()) + " != " +
                     std::to_string(n) + " x " +
                     std::to_string(net.input_dim()));
  }
  for (int a : batch.actions) {
    if (a < 0 || a >= net.output_dim()) {
      throw UsageError("masked action " + std::to_string(a) +
                       " outside the output layer");
    }
  }
}

// Pre-activation and activation of every layer for one sample; acts[0] is
// the input itself.
struct Trace {
  std::vector<std::vector<double>> acts;
};

Trace forward_trace(const Mlp& net, std::span<const double> x) {
  const auto& dims = net.layer_dims();
  Trace tr;
  tr.acts.reserve(dims.size());
  tr.acts.emplace_back(x.begin(), x.end());
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto& in = tr.acts.back();
    std::vector<double> out(dims[l + 1]);
    const bool hidden = l + 1 < net.num_layers();
    for (int o = 0; o < dims[l + 1]; ++o) {
      double z = net.bias(l, o);
      for (int i = 0; i < dims[l]; ++i) z += net.weight(l, o, i) * in[i];
      out[o] = hidden ? std::max(0.0, z) : z;
    }
    tr.acts.push_back(std::move(out));
  }
  return tr;
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) {
    throw ConfigError("neural.layer_dims needs at least two entries");
  }
  for (int d : dims_) {
    if (d <= 0) throw ConfigError("neural.layer_dims entries must be > 0");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

double& Mlp::weight(int layer, int out, int in) {
  return params_[weight_offset(layer) +
                 static_cast<std::size_t>(out) * dims_[layer] + in];
}

double Mlp::weight(int layer, int out, int in) const {
  return params_[weight_offset(layer) +
                 static_cast<std::size_t>(out) * dims_[layer] + in];
}

double& Mlp::bias(int layer, int out) {
  return params_[bias_offset(layer) + out];
}

double Mlp::bias(int layer, int out) const {
  return params_[bias_offset(layer) + out];
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (input.size() != static_cast<std::size_t>(input_dim())) {
    throw UsageError("forward input size " + std::to_string(input.size()) +
                     " != " + std::to_string(input_dim()));
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw DomainError("non-finite network input");
  }
  return std::move(forward_trace(*this, input).acts.back());
}

Mlp init_network(const std::vector<int>& layer_dims, std::uint64_t seed) {
  Mlp net(layer_dims);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < net.num_layers(); ++l) {
    const int fan_in = layer_dims[l];
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (int o = 0; o < layer_dims[l + 1]; ++o) {
      for (int i = 0; i < fan_in; ++i) net.weight(l, o, i) = dist(rng);
    }
  }
  return net;
}

Mlp mlp_init(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() != 4 || layer_dims.front() != 2 ||
      layer_dims.back() != 40) {
    throw ConfigError(
        "neural.layer_dims must be [2, h1, h2, 40] for the Q-network");
  }
  return init_network(layer_dims, seed);
}

double masked_mse(const Mlp& net, const Batch& batch) {
  check_batch(net, batch);
  const std::size_t n = batch.targets.size();
  const std::size_t in_dim = net.input_dim();
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto q = forward_trace(net, batch.inputs.subspan(s * in_dim, in_dim))
                       .acts.back();
    const double err = q[batch.actions[s]] - batch.targets[s];
    sum += err * err;
  }
  return sum / static_cast<double>(n);
}

LossGradient loss_and_gradient(const Mlp& net, const Batch& batch) {
  check_batch(net, batch);
  const auto& dims = net.layer_dims();
  const std::size_t n = batch.targets.size();
  const std::size_t in_dim = net.input_dim();
  const double scale = 1.0 / static_cast<double>(n);

  // Reuse the network's own layout for the gradient accumulator.
  Mlp grad(dims);
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const Trace tr =
        forward_trace(net, batch.inputs.subspan(s * in_dim, in_dim));
    const int a = batch.actions[s];
    const double err = tr.acts.back()[a] - batch.targets[s];
    sum += err * err;

    // dL/dz for the output layer: nonzero only at the taken action.
    std::vector<double> delta(dims.back(), 0.0);
    delta[a] = 2.0 * err * scale;
    for (int l = net.num_layers() - 1; l >= 0; --l) {
      const auto& in = tr.acts[l];
      for (int o = 0; o < dims[l + 1]; ++o) {
        if (delta[o] == 0.0) continue;
        grad.bias(l, o) += delta[o];
        for (int i = 0; i < dims[l]; ++i) grad.weight(l, o, i) += delta[o] * in[i];
      }
      if (l == 0) break;
      std::vector<double> prev(dims[l], 0.0);
      for (int i = 0; i < dims[l]; ++i) {
        if (in[i] <= 0.0) continue;  // rectified-linear derivative
        double g = 0.0;
        for (int o = 0; o < dims[l + 1]; ++o) g += net.weight(l, o, i) * delta[o];
        prev[i] = g;
      }
      delta = std::move(prev);
    }
  }
  auto p = grad.parameters();
  return LossGradient{sum * scale, std::vector<double>(p.begin(), p.end())};
}

AdamState::AdamState(const Mlp& net, AdamConfig config)
    : config_(config),
      m_(net.num_parameters(), 0.0),
      v_(net.num_parameters(), 0.0) {
  if (!(config_.lr > 0.0) || !(config_.beta1 >= 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 >= 0.0 && config_.beta2 < 1.0) ||
      !(config_.eps_hat > 0.0)) {
    throw ConfigError(
        "neural: need lr > 0, beta1/beta2 in [0, 1), eps_hat > 0");
  }
}

void AdamState::apply(std::span<double> params,
                      std::span<const double> gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    throw UsageError("optimizer state does not match the network shape");
  }
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps_hat);
  }
}

double train_on_batch(Mlp& net, AdamState& opt, const Batch& batch) {
  const LossGradient lg = loss_and_gradient(net, batch);
  opt.apply(net.parameters(), lg.gradient);
  for (double p : net.parameters()) {
    if (!std::isfinite(p)) {
      throw DomainError("non-finite network parameter after update");
    }
  }
  return lg.loss;
}

double gradient_check(const Mlp& net, const Batch& batch, double h,
                      const GradientFn& analytic) {
  const LossGradient lg = analytic(net, batch);
  Mlp probe = net;
  auto params = probe.parameters();
  if (lg.gradient.size() != params.size()) {
    throw UsageError("analytic gradient has the wrong size");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = masked_mse(probe, batch);
    params[i] = saved - h;
    const double down = masked_mse(probe, batch);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double ga = lg.gradient[i];
    const double denom = std::max({std::abs(ga), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(ga - numeric) / denom);
  }
  return worst;
}

void copy_parameters(const Mlp& src, Mlp& dst) {
  if (src.layer_dims() != dst.layer_dims()) {
    throw UsageError("copy_parameters between networks of different shape");
  }
  std::ranges::copy(src.parameters(), dst.parameters().begin());
}

nlohmann::json to_json(const Mlp& net) {
  nlohmann::json doc;
  doc["layer_dims"] = net.layer_dims();
  auto weights = nlohmann::json::array();
  auto biases = nlohmann::json::array();
  const auto& dims = net.layer_dims();
  for (int l = 0; l < net.num_layers(); ++l) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(dims[l]) * dims[l + 1]);
    for (int o = 0; o < dims[l + 1]; ++o) {
      for (int i = 0; i < dims[l]; ++i) w.push_back(net.weight(l, o, i));
    }
    std::vector<double> b;
    for (int o = 0; o < dims[l + 1]; ++o) b.push_back(net.bias(l, o));
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  return doc;
}

Mlp mlp_from_json(const nlohmann::json& doc) {
  try {
    Mlp net(doc.at("layer_dims").get<std::vector<int>>());
    const auto& dims = net.layer_dims();
    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() != static_cast<std::size_t>(net.num_layers()) ||
        biases.size() != static_cast<std::size_t>(net.num_layers())) {
      throw ConfigError("checkpoint layer count does not match layer_dims");
    }
    for (int l = 0; l < net.num_layers(); ++l) {
      const auto w = weights[l].get<std::vector<double>>();
      const auto b = biases[l].get<std::vector<double>>();
      if (w.size() != static_cast<std::size_t>(dims[l]) * dims[l + 1] ||
          b.size() != static_cast<std::size_t>(dims[l + 1])) {
        throw ConfigError("checkpoint layer " + std::to_string(l) +
                          " has the wrong number of parameters");
      }
      std::size_t k = 0;
      for (int o = 0; o < dims[l + 1]; ++o) {
        for (int i = 0; i < dims[l]; ++i) net.weight(l, o, i) = w[k++];
        net.bias(l, o) = b[o];
      }
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network checkpoint: ") + e.what());
  }
}

void save_network(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << to_json(net).dump() << '\n';
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

Mlp load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed network checkpoint " + path + ": " + e.what());
  }
  return mlp_from_json(doc);
}

}  // namespace edge_forge
