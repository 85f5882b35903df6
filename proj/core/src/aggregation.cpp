#include "metafl/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "metafl/rng.hpp"

namespace metafl {

namespace {

void log_warn(const char* msg) {
  const char* lvl = std::getenv("METAFL_LOG");
  if (lvl && std::string_view(lvl) != "off" && std::string_view(lvl) != "quiet")
    std::cerr << "[metafl] warning: " << msg << '\n';
}

void check_nonempty(const std::vector<ParamVec>& updates, const char* what) {
  if (updates.empty()) throw std::invalid_argument(std::string(what) + ": no updates");
  for (const auto& u : updates)
    require_same_dim(u.size(), updates.front().size(), what);
}

std::size_t trim_count(double trim_fraction, std::size_t n, const char* what) {
  if (trim_fraction < 0.0 || trim_fraction >= 0.5)
    throw std::invalid_argument(std::string(what) + ": trim fraction outside [0, 0.5)");
  auto k = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));
  if (2 * k >= n) throw std::invalid_argument(std::string(what) + ": trims away everything");
  return k;
}

}  // namespace

void DefenseAction::validate() const {
  if (trim_fraction < 0.0 || trim_fraction >= 0.5)
    throw std::invalid_argument("DefenseAction: trim_fraction outside [0, 0.5)");
  if (norm_bound <= 0.0 || norm_bound_backdoor <= 0.0)
    throw std::invalid_argument("DefenseAction: norm bounds must be positive");
  if (cosine_threshold < -1.0 || cosine_threshold > 1.0)
    throw std::invalid_argument("DefenseAction: cosine_threshold outside [-1, 1]");
  if (noise_variance < 0.0)
    throw std::invalid_argument("DefenseAction: noise_variance must be >= 0");
  if (post_kind == PostTrainKind::neuron_clip && clip_range <= 0.0)
    throw std::invalid_argument("DefenseAction: clip_range must be positive");
  if (post_kind == PostTrainKind::prune && (prune_rate < 0.0 || prune_rate > 1.0))
    throw std::invalid_argument("DefenseAction: prune_rate outside [0, 1]");
}

ParamVec trimmed_mean(const std::vector<ParamVec>& updates, double trim_fraction) {
  check_nonempty(updates, "trimmed_mean");
  return weighted_trimmed_mean(updates, std::vector<double>(updates.size(), 1.0),
                               trim_fraction);
}

ParamVec weighted_trimmed_mean(const std::vector<ParamVec>& updates,
                               const std::vector<double>& weights, double trim_fraction) {
  check_nonempty(updates, "weighted_trimmed_mean");
  if (weights.size() != updates.size())
    throw std::invalid_argument("weighted_trimmed_mean: weights not parallel to updates");
  const std::size_t n = updates.size();
  const std::size_t dim = updates.front().size();
  const std::size_t k = trim_count(trim_fraction, n, "weighted_trimmed_mean");

  ParamVec out(dim, 0.0);
  std::vector<std::pair<double, std::size_t>> column(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {updates[i][d], i};
    std::sort(column.begin(), column.end());
    double wsum = 0.0, vsum = 0.0;
    for (std::size_t i = k; i < n - k; ++i) {
      double w = weights[column[i].second];
      wsum += w;
      vsum += w * column[i].first;
    }
    out[d] = wsum > 0.0 ? vsum / wsum : 0.0;
  }
  return out;
}

ParamVec coordinate_median(const std::vector<ParamVec>& updates) {
  check_nonempty(updates, "coordinate_median");
  const std::size_t n = updates.size();
  const std::size_t dim = updates.front().size();
  ParamVec out(dim);
  std::vector<double> column(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][d];
    std::sort(column.begin(), column.end());
    out[d] = (n % 2 == 1) ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

std::vector<double> krum_scores(const std::vector<ParamVec>& updates, int f_count) {
  check_nonempty(updates, "krum");
  const int n = static_cast<int>(updates.size());
  if (f_count < 0 || n < f_count + 3)
    throw std::invalid_argument("krum: need at least f_count + 3 updates");
  const int neighbors = n - f_count - 2;

  // pairwise squared distances, then per row sum the `neighbors` smallest
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < updates[i].size(); ++d) {
        double diff = updates[i][d] - updates[j][d];
        s += diff * diff;
      }
      dist[i][j] = dist[j][i] = s;
    }
  }
  std::vector<double> scores(n);
  std::vector<double> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) row.push_back(dist[i][j]);
    std::nth_element(row.begin(), row.begin() + (neighbors - 1), row.end());
    scores[i] = std::accumulate(row.begin(), row.begin() + neighbors, 0.0);
  }
  return scores;
}

KrumResult krum(const std::vector<ParamVec>& updates, int f_count) {
  auto scores = krum_scores(updates, f_count);
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i] < scores[best]) best = i;
  return {updates[best], best};
}

ParamVec norm_clip(ParamVec update, double bound) {
  if (bound <= 0.0) throw std::invalid_argument("norm_clip: bound must be positive");
  double norm = l2_norm(update);
  if (norm > bound) {
    double scale = bound / norm;
    for (double& x : update) x *= scale;
  }
  return update;
}

std::vector<double> foolsgold_weights(const std::vector<ParamVec>& history,
                                      double cosine_threshold) {
  check_nonempty(history, "foolsgold_weights");
  if (history.size() < 2)
    throw std::invalid_argument("foolsgold_weights: need at least 2 clients");
  if (cosine_threshold < -1.0 || cosine_threshold > 1.0)
    throw std::invalid_argument("foolsgold_weights: threshold outside [-1, 1]");

  const std::size_t n = history.size();
  std::vector<double> norms(n);
  bool warned = false;
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = l2_norm(history[i]);
    if (norms[i] == 0.0 && !warned) {
      log_warn("foolsgold_weights: zero-norm history vector, assigning weight 1");
      warned = true;
    }
  }

  std::vector<double> weights(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;  // weight 1
    double s = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norms[j] == 0.0) continue;
      s = std::max(s, dot(history[i], history[j]) / (norms[i] * norms[j]));
    }
    if (s <= cosine_threshold) continue;  // weight 1 (covers c == 1 exactly)
    weights[i] = std::max(0.0, (1.0 - s) / (1.0 - cosine_threshold));
  }
  return weights;
}

ParamVec add_gaussian_noise(ParamVec update, double variance, std::uint64_t seed) {
  if (variance < 0.0) throw std::invalid_argument("add_gaussian_noise: variance < 0");
  if (variance == 0.0) return update;
  auto engine = make_engine(derive(seed, "gaussian-noise"));
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  for (double& x : update) x += noise(engine);
  return update;
}

ParamVec neuron_clip(ParamVec params, double clip_range, const ModelSpec& spec) {
  if (clip_range <= 0.0) throw std::invalid_argument("neuron_clip: clip range must be > 0");
  if (spec.arch == Architecture::linear_softmax) {
    const int off = spec.output_weights_offset();
    const int cnt = spec.output_weights_count();
    for (int i = off; i < off + cnt; ++i)
      params[i] = std::clamp(params[i], -clip_range, clip_range);
    return params;
  }
  const int h = spec.hidden_width;
  const int off = spec.output_weights_offset();
  for (int j = 0; j < h; ++j) {
    double s = 0.0;
    for (int c = 0; c < spec.classes; ++c) {
      double w = params[off + c * h + j];
      s += w * w;
    }
    double norm = std::sqrt(s);
    if (norm > clip_range) {
      double scale = clip_range / norm;
      for (int c = 0; c < spec.classes; ++c) params[off + c * h + j] *= scale;
    }
  }
  return params;
}

ParamVec prune_small_weights(ParamVec params, double prune_rate, const ModelSpec& spec) {
  if (prune_rate < 0.0 || prune_rate > 1.0)
    throw std::invalid_argument("prune_small_weights: rate outside [0, 1]");
  const int off = spec.output_weights_offset();
  const int cnt = spec.output_weights_count();
  const int kill = static_cast<int>(std::floor(prune_rate * cnt));
  if (kill == 0) return params;

  std::vector<int> order(cnt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(params[off + a]) < std::abs(params[off + b]);
  });
  for (int i = 0; i < kill; ++i) params[off + order[i]] = 0.0;
  return params;
}

ParamVec apply_defense(const DefenseAction& action, const std::vector<ParamVec>& updates,
                       const std::vector<ParamVec>* foolsgold_history,
                       std::uint64_t noise_seed) {
  action.validate();
  check_nonempty(updates, "apply_defense");
  if (foolsgold_history && foolsgold_history->size() != updates.size())
    throw std::invalid_argument("apply_defense: history not parallel to updates");

  double bound = action.mode == DefenseMode::untargeted ? action.norm_bound
                 : action.mode == DefenseMode::backdoor
                     ? action.norm_bound_backdoor
                     : std::min(action.norm_bound, action.norm_bound_backdoor);

  std::vector<ParamVec> clipped;
  clipped.reserve(updates.size());
  for (const auto& u : updates) clipped.push_back(norm_clip(u, bound));

  ParamVec aggregate;
  if (action.mode == DefenseMode::backdoor) {
    aggregate = trimmed_mean(clipped, 0.0);  // plain mean
  } else {
    std::vector<double> weights(clipped.size(), 1.0);
    if (foolsgold_history && clipped.size() >= 2)
      weights = foolsgold_weights(*foolsgold_history, action.cosine_threshold);
    aggregate = weighted_trimmed_mean(clipped, weights, action.trim_fraction);
  }

  if (action.mode != DefenseMode::untargeted && action.noise_variance > 0.0)
    aggregate = add_gaussian_noise(std::move(aggregate), action.noise_variance, noise_seed);
  return aggregate;
}

ParamVec post_train(const DefenseAction& action, ParamVec params, const ModelSpec& spec) {
  switch (action.post_kind) {
    case PostTrainKind::neuron_clip:
      return neuron_clip(std::move(params), action.clip_range, spec);
    case PostTrainKind::prune:
      return prune_small_weights(std::move(params), action.prune_rate, spec);
    case PostTrainKind::none:
      throw std::invalid_argument("post_train: no post-training defense configured");
  }
  return params;
}

}  // namespace metafl
