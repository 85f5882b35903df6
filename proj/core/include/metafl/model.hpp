#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metafl/dataset.hpp"
#include "metafl/vec.hpp"

namespace metafl {

enum class Architecture { linear_softmax, one_hidden };

// Desk-scale softmax classifiers. Parameter layout (row-major):
//   linear_softmax: W (C x dim), b (C)
//   one_hidden:     W1 (h x dim), b1 (h), W2 (C x h), b2 (C), tanh hidden
struct ModelSpec {
  Architecture arch = Architecture::linear_softmax;
  int input_dim = 2;
  int classes = 2;
  int hidden_width = 0;

  int param_count() const;
  // Index range [first, first+count) of the output-layer weight matrix
  // (biases excluded); the scope of post-training pruning and clipping.
  int output_weights_offset() const;
  int output_weights_count() const;
  void validate() const;
};

ParamVec init_params(const ModelSpec& spec, double stddev, std::uint64_t seed);

std::vector<double> logits(const ModelSpec& spec, const ParamVec& params,
                           std::span<const double> features);

int predict(const ModelSpec& spec, const ParamVec& params, std::span<const double> features);

// Mean cross-entropy over the batch.
double loss_mean(const ModelSpec& spec, const ParamVec& params,
                 std::span<const Sample> samples);

// lambda * loss(clean) + (1 - lambda) * loss(poisoned).
double loss_mixed(const ModelSpec& spec, const ParamVec& params,
                  std::span<const Sample> clean, std::span<const Sample> poisoned,
                  double lambda);

// lambda' * loss(clean) - (1 - lambda') * min over candidate labels c of the
// mean cross-entropy of the triggered inputs relabeled to c. Captures the
// worst case over an unknown backdoor target label.
double loss_backdoor_worst(const ModelSpec& spec, const ParamVec& params,
                           std::span<const Sample> clean,
                           std::span<const std::vector<double>> trigger_inputs,
                           double lambda_prime);

// Exact gradient of loss_mean on the batch.
ParamVec loss_gradient(const ModelSpec& spec, const ParamVec& params,
                       std::span<const Sample> samples);

// Runs n_iters minibatch SGD steps from global_params and returns the delta
// g = global_params - params_after_sgd; the server later subtracts the
// aggregated deltas from the global model. Minibatch order comes from a
// per-call seeded stream.
ParamVec local_update(const ModelSpec& spec, const ParamVec& global_params,
                      const ClientShard& shard, double lr, int n_iters, int batch_size,
                      std::uint64_t seed);

double accuracy(const ModelSpec& spec, const ParamVec& params,
                std::span<const Sample> samples);

// Fraction of triggered inputs classified as the trigger's target label,
// measured over samples whose true label differs from the target.
double backdoor_accuracy(const ModelSpec& spec, const ParamVec& params,
                         std::span<const Sample> clean_samples, const TriggerSpec& trigger);

}  // namespace metafl
