#pragma once

// Small fully connected network: rectified-linear hidden layers, identity
// output. All parameters live in one flat buffer (per layer: weights in
// row-major [out][in] order, then biases) so that the optimizer, the
// parameter copy and the finite-difference check all work on one span.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace edge_forge {

class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized network. Throws ConfigError for fewer than two layers
  // or non-positive widths.
  explicit Mlp(std::vector<int> layer_dims);

  const std::vector<int>& layer_dims() const { return dims_; }
  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t num_parameters() const { return params_.size(); }

  double& weight(int layer, int out, int in);
  double weight(int layer, int out, int in) const;
  double& bias(int layer, int out);
  double bias(int layer, int out) const;

  // Throws DomainError on non-finite input, UsageError on a size mismatch.
  std::vector<double> forward(std::span<const double> input) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const {
    return offsets_[layer] +
           static_cast<std::size_t>(dims_[layer]) * dims_[layer + 1];
  }

  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

inline const std::vector<int> kDefaultLayerDims = {2, 24, 24, 40};

// He-initialized network (weights ~ N(0, 2/fan_in), zero biases) of any
// shape. Deterministic given the seed.
Mlp init_network(const std::vector<int>& layer_dims, std::uint64_t seed);

// As init_network, but enforces the Q-network contract: four layer widths,
// 2 inputs, 40 outputs.
Mlp mlp_init(const std::vector<int>& layer_dims, std::uint64_t seed);

// Squared error on the output selected by actions[i]:
//   loss = 1/n * sum_i (q_i[actions[i]] - targets[i])^2
// `inputs` is row-major n x input_dim.
struct Batch {
  std::span<const double> inputs;
  std::span<const double> targets;
  std::span<const int> actions;
};

double masked_mse(const Mlp& net, const Batch& batch);

// Loss and its gradient with respect to the flat parameter vector.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

LossGradient loss_and_gradient(const Mlp& net, const Batch& batch);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(const Mlp& net, AdamConfig config);

  // One bias-corrected Adam update of `params` along `gradient`.
  void apply(std::span<double> params, std::span<const double> gradient);

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return step_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t step_ = 0;
};

// Backpropagates the masked loss and applies one Adam step. Returns the loss
// measured before the update.
double train_on_batch(Mlp& net, AdamState& opt, const Batch& batch);

using GradientFn = std::function<LossGradient(const Mlp&, const Batch&)>;

// Max over parameters of |g_a - g_n| / max(|g_a|, |g_n|, 1e-8), comparing
// the analytic gradient against central differences with step h.
double gradient_check(const Mlp& net, const Batch& batch, double h = 1e-5,
                      const GradientFn& analytic = loss_and_gradient);

// Throws UsageError unless both networks share layer_dims.
void copy_parameters(const Mlp& src, Mlp& dst);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

void save_network(const Mlp& net, const std::string& path);
Mlp load_network(const std::string& path);

}  // namespace edge_forge
