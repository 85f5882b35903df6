#include "metafl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "metafl/rng.hpp"

namespace metafl {

namespace {

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// softmax probabilities computed from logits, in place
void softmax_inplace(std::vector<double>& v) {
  double lse = log_sum_exp(v);
  for (double& x : v) x = std::exp(x - lse);
}

struct Layout {
  int w1 = 0, b1 = 0, w2 = 0, b2 = 0;
};

Layout layout_of(const ModelSpec& s) {
  Layout l;
  if (s.arch == Architecture::linear_softmax) {
    l.w1 = 0;
    l.b1 = s.classes * s.input_dim;
  } else {
    l.w1 = 0;
    l.b1 = s.hidden_width * s.input_dim;
    l.w2 = l.b1 + s.hidden_width;
    l.b2 = l.w2 + s.classes * s.hidden_width;
  }
  return l;
}

}  // namespace

void ModelSpec::validate() const {
  if (input_dim < 1 || classes < 1)
    throw std::invalid_argument("ModelSpec: input_dim and classes must be positive");
  if (arch == Architecture::one_hidden && hidden_width < 1)
    throw std::invalid_argument("ModelSpec: one_hidden needs hidden_width >= 1");
}

int ModelSpec::param_count() const {
  if (arch == Architecture::linear_softmax) return classes * (input_dim + 1);
  return hidden_width * (input_dim + 1) + classes * (hidden_width + 1);
}

int ModelSpec::output_weights_offset() const {
  if (arch == Architecture::linear_softmax) return 0;
  return hidden_width * (input_dim + 1);
}

int ModelSpec::output_weights_count() const {
  if (arch == Architecture::linear_softmax) return classes * input_dim;
  return classes * hidden_width;
}

ParamVec init_params(const ModelSpec& spec, double stddev, std::uint64_t seed) {
  spec.validate();
  ParamVec params(spec.param_count());
  auto engine = make_engine(derive(seed, "init"));
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& p : params) p = dist(engine);
  return params;
}

std::vector<double> logits(const ModelSpec& spec, const ParamVec& params,
                           std::span<const double> features) {
  const Layout l = layout_of(spec);
  const int dim = spec.input_dim;
  std::vector<double> out(spec.classes);
  if (spec.arch == Architecture::linear_softmax) {
    for (int c = 0; c < spec.classes; ++c) {
      double z = params[l.b1 + c];
      const double* w = params.data() + l.w1 + c * dim;
      for (int d = 0; d < dim; ++d) z += w[d] * features[d];
      out[c] = z;
    }
    return out;
  }
  const int h = spec.hidden_width;
  std::vector<double> hid(h);
  for (int j = 0; j < h; ++j) {
    double z = params[l.b1 + j];
    const double* w = params.data() + l.w1 + j * dim;
    for (int d = 0; d < dim; ++d) z += w[d] * features[d];
    hid[j] = std::tanh(z);
  }
  for (int c = 0; c < spec.classes; ++c) {
    double z = params[l.b2 + c];
    const double* w = params.data() + l.w2 + c * h;
    for (int j = 0; j < h; ++j) z += w[j] * hid[j];
    out[c] = z;
  }
  return out;
}

int predict(const ModelSpec& spec, const ParamVec& params, std::span<const double> features) {
  auto z = logits(spec, params, features);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double loss_mean(const ModelSpec& spec, const ParamVec& params,
                 std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("loss_mean: empty sample set");
  double total = 0.0;
  for (const Sample& s : samples) {
    auto z = logits(spec, params, s.features);
    total += log_sum_exp(z) - z[s.label];
  }
  return total / static_cast<double>(samples.size());
}

double loss_mixed(const ModelSpec& spec, const ParamVec& params,
                  std::span<const Sample> clean, std::span<const Sample> poisoned,
                  double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("loss_mixed: lambda outside [0,1]");
  double value = 0.0;
  if (lambda > 0.0) value += lambda * loss_mean(spec, params, clean);
  if (lambda < 1.0) value += (1.0 - lambda) * loss_mean(spec, params, poisoned);
  return value;
}

double loss_backdoor_worst(const ModelSpec& spec, const ParamVec& params,
                           std::span<const Sample> clean,
                           std::span<const std::vector<double>> trigger_inputs,
                           double lambda_prime) {
  if (lambda_prime < 0.0 || lambda_prime > 1.0)
    throw std::invalid_argument("loss_backdoor_worst: lambda_prime outside [0,1]");
  if (trigger_inputs.empty())
    throw std::invalid_argument("loss_backdoor_worst: empty trigger set");

  double value = lambda_prime > 0.0 ? lambda_prime * loss_mean(spec, params, clean) : 0.0;
  if (lambda_prime == 1.0) return value;

  // mean cross-entropy of the triggered inputs per candidate target label
  std::vector<double> per_label(spec.classes, 0.0);
  for (const auto& x : trigger_inputs) {
    auto z = logits(spec, params, x);
    double lse = log_sum_exp(z);
    for (int c = 0; c < spec.classes; ++c) per_label[c] += lse - z[c];
  }
  double worst = std::numeric_limits<double>::infinity();
  for (double v : per_label) worst = std::min(worst, v / static_cast<double>(trigger_inputs.size()));
  return value - (1.0 - lambda_prime) * worst;
}

ParamVec loss_gradient(const ModelSpec& spec, const ParamVec& params,
                       std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("loss_gradient: empty batch");
  const Layout l = layout_of(spec);
  const int dim = spec.input_dim;
  ParamVec grad(spec.param_count(), 0.0);

  if (spec.arch == Architecture::linear_softmax) {
    for (const Sample& s : samples) {
      auto p = logits(spec, params, s.features);
      softmax_inplace(p);
      p[s.label] -= 1.0;
      for (int c = 0; c < spec.classes; ++c) {
        double* gw = grad.data() + l.w1 + c * dim;
        for (int d = 0; d < dim; ++d) gw[d] += p[c] * s.features[d];
        grad[l.b1 + c] += p[c];
      }
    }
  } else {
    const int h = spec.hidden_width;
    std::vector<double> hid(h);
    for (const Sample& s : samples) {
      for (int j = 0; j < h; ++j) {
        double z = params[l.b1 + j];
        const double* w = params.data() + l.w1 + j * dim;
        for (int d = 0; d < dim; ++d) z += w[d] * s.features[d];
        hid[j] = std::tanh(z);
      }
      std::vector<double> p(spec.classes);
      for (int c = 0; c < spec.classes; ++c) {
        double z = params[l.b2 + c];
        const double* w = params.data() + l.w2 + c * h;
        for (int j = 0; j < h; ++j) z += w[j] * hid[j];
        p[c] = z;
      }
      softmax_inplace(p);
      p[s.label] -= 1.0;
      for (int c = 0; c < spec.classes; ++c) {
        double* gw = grad.data() + l.w2 + c * h;
        for (int j = 0; j < h; ++j) gw[j] += p[c] * hid[j];
        grad[l.b2 + c] += p[c];
      }
      for (int j = 0; j < h; ++j) {
        double back = 0.0;
        for (int c = 0; c < spec.classes; ++c) back += p[c] * params[l.w2 + c * h + j];
        back *= 1.0 - hid[j] * hid[j];
        double* gw = grad.data() + l.w1 + j * dim;
        for (int d = 0; d < dim; ++d) gw[d] += back * s.features[d];
        grad[l.b1 + j] += back;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (double& g : grad) g *= inv;
  return grad;
}

ParamVec local_update(const ModelSpec& spec, const ParamVec& global_params,
                      const ClientShard& shard, double lr, int n_iters, int batch_size,
                      std::uint64_t seed) {
  if (shard.samples.empty()) throw std::invalid_argument("local_update: empty shard");
  if (n_iters < 0 || batch_size < 1)
    throw std::invalid_argument("local_update: bad iteration/batch settings");

  const std::size_t n = shard.samples.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(batch_size), n);
  auto engine = make_engine(derive(seed, "minibatch"));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  ParamVec params = global_params;
  std::vector<Sample> batch(k);
  for (int it = 0; it < n_iters; ++it) {
    // partial Fisher-Yates: the first k entries become the minibatch
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(engine)]);
      batch[i] = shard.samples[idx[i]];
    }
    ParamVec g = loss_gradient(spec, params, batch);
    axpy(-lr, g, params);
  }

  ParamVec delta(params.size());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = global_params[i] - params[i];
  return delta;
}

double accuracy(const ModelSpec& spec, const ParamVec& params,
                std::span<const Sample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Sample& s : samples)
    if (predict(spec, params, s.features) == s.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double backdoor_accuracy(const ModelSpec& spec, const ParamVec& params,
                         std::span<const Sample> clean_samples, const TriggerSpec& trigger) {
  std::size_t total = 0, hits = 0;
  for (const Sample& s : clean_samples) {
    if (s.label == trigger.target_label) continue;
    ++total;
    Sample t = apply_trigger(s, trigger);
    if (predict(spec, params, t.features) == trigger.target_label) ++hits;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace metafl
