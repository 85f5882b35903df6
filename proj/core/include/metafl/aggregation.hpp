#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "metafl/model.hpp"
#include "metafl/vec.hpp"

namespace metafl {

enum class DefenseMode { untargeted, backdoor, mixed };
enum class PostTrainKind { none, neuron_clip, prune };

// Continuous defense hyperparameters, one knob per catalog component.
// The untargeted pipeline is (trim b, norm bound a, cosine threshold c);
// the backdoor pipeline is (noise variance d, norm bound a, then a
// post-training repair with clip range e or prune rate f). Each pipeline
// carries its own norm bound.
struct DefenseAction {
  DefenseMode mode = DefenseMode::untargeted;
  double trim_fraction = 0.0;                                        // b in [0, 0.5)
  double norm_bound = std::numeric_limits<double>::infinity();       // a (untargeted)
  double cosine_threshold = 1.0;                                     // c in [-1, 1]
  double noise_variance = 0.0;                                       // d >= 0
  double norm_bound_backdoor = std::numeric_limits<double>::infinity();  // a (backdoor)
  PostTrainKind post_kind = PostTrainKind::none;
  double clip_range = 1.0;   // e > 0
  double prune_rate = 0.0;   // f in [0, 1]

  void validate() const;
};

// Coordinate-wise mean after dropping the floor(b*n) largest and smallest
// values per coordinate.
ParamVec trimmed_mean(const std::vector<ParamVec>& updates, double trim_fraction);

// Same trimming, but surviving values are combined as a weighted mean
// (sum w*v / sum w); a coordinate with zero surviving weight yields 0.
ParamVec weighted_trimmed_mean(const std::vector<ParamVec>& updates,
                               const std::vector<double>& weights, double trim_fraction);

ParamVec coordinate_median(const std::vector<ParamVec>& updates);

struct KrumResult {
  ParamVec selected;
  int index = 0;
};

// Score of update i = sum of squared distances to its n - f_count - 2
// nearest neighbors (self excluded); the argmin wins, ties to the lowest
// index. Requires n >= f_count + 3.
KrumResult krum(const std::vector<ParamVec>& updates, int f_count);
std::vector<double> krum_scores(const std::vector<ParamVec>& updates, int f_count);

// Projects onto the L2 ball of radius bound.
ParamVec norm_clip(ParamVec update, double bound);

// FoolsGold-style reweighting from accumulated per-client update history:
// s_i = max cosine similarity to any other history; weight 1 if s_i <= c,
// otherwise max(0, (1 - s_i) / (1 - c)). A zero-norm history gets weight 1
// (with a warning logged).
std::vector<double> foolsgold_weights(const std::vector<ParamVec>& history,
                                      double cosine_threshold);

// Adds iid zero-mean Gaussian noise of the given variance per coordinate.
ParamVec add_gaussian_noise(ParamVec update, double variance, std::uint64_t seed);

// Post-training repair: per hidden neuron, rescale its outgoing weights to
// L2 norm at most clip_range; for linear models, clamp each weight to
// [-clip_range, clip_range]. Biases untouched.
ParamVec neuron_clip(ParamVec params, double clip_range, const ModelSpec& spec);

// Zeroes the floor(rate * L) smallest-magnitude output-layer weights
// (L = output-layer weight count, biases excluded), ties by index order.
ParamVec prune_small_weights(ParamVec params, double prune_rate, const ModelSpec& spec);

// Training-stage composition. untargeted: clip(a) -> foolsgold(c) ->
// weighted trimmed mean(b). backdoor: clip(a) -> mean -> noise(d).
// mixed: clip -> foolsgold -> trimmed mean -> noise, with each pipeline's
// own norm bound applied (the tighter of the two per update).
// history, when present, must be parallel to updates.
ParamVec apply_defense(const DefenseAction& action, const std::vector<ParamVec>& updates,
                       const std::vector<ParamVec>* foolsgold_history,
                       std::uint64_t noise_seed);

// Post-training repair dispatch on the final global model.
ParamVec post_train(const DefenseAction& action, ParamVec params, const ModelSpec& spec);

}  // namespace metafl
