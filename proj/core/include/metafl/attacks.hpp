#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "metafl/dataset.hpp"
#include "metafl/model.hpp"
#include "metafl/vec.hpp"

namespace metafl {

enum class AttackKind {
  ipm,              // negated scaled benign mean
  lmp,              // directed deviation within z std devs of the benign mean
  eb,               // explicitly boosted own update
  backdoor_static,  // model replacement with a fixed trigger
  rl_untargeted,    // 3-dim learned action mapped over benign statistics
  rl_backdoor       // 3-dim learned action shaping a replacement update
};

// The attacker's private type: which behavior it runs and how many clients
// it controls. backdoor_clients (m1) run the backdoor side of the reward,
// untargeted_clients (m2) the poisoning side; rho = m1 / (m1 + m2).
struct AttackTypeSpec {
  std::string name;
  AttackKind kind = AttackKind::ipm;
  int backdoor_clients = 0;   // m1
  int untargeted_clients = 0;  // m2

  double epsilon = 0.5;           // ipm strength
  double z = 1.5;                 // lmp deviation in std devs
  double boost = 1.0;             // eb multiplier
  TriggerSpec trigger;            // backdoor kinds
  double replacement_scale = 1.0;  // backdoor boost at aggregation
  double poison_ratio = 0.5;      // fraction of a malicious shard triggered

  // how an RL type's initial policy is pre-trained (a classical defense name:
  // "krum", "clipping_median", "norm_clip", or empty for a fresh policy)
  std::string pretrain_against;

  bool is_rl() const {
    return kind == AttackKind::rl_untargeted || kind == AttackKind::rl_backdoor;
  }
  bool uses_trigger() const {
    return kind == AttackKind::backdoor_static || kind == AttackKind::rl_backdoor ||
           backdoor_clients > 0;
  }
  int total_clients() const { return backdoor_clients + untargeted_clients; }
  double rho() const {
    return static_cast<double>(backdoor_clients) / static_cast<double>(total_clients());
  }
  void validate(int dim, int classes) const;
};

// Updates submitted by the sampled malicious clients this round,
// keyed by client id. Unsampled malicious clients send nothing.
struct AttackAction {
  std::vector<std::pair<int, ParamVec>> updates;
};

// count copies of -epsilon * benign_mean; anti-aligned with the benign mean.
std::vector<ParamVec> ipm_craft(const ParamVec& benign_mean, double epsilon, int count);

// Per coordinate mean_j - sign(mean_j) * z * std_j over the benign
// estimates (population std); all count copies identical.
std::vector<ParamVec> lmp_craft(const std::vector<ParamVec>& benign_estimates, double z,
                                int count);

ParamVec eb_craft(const ParamVec& intended_update, double boost);

// Trains locally from global_params on the lambda-mixed clean/poisoned
// objective, then boosts the resulting delta by `scale` (model replacement).
// The shard must contain at least one poisoned sample.
ParamVec backdoor_craft(const ModelSpec& spec, const ParamVec& global_params,
                        const ClientShard& poisoned_shard, double lambda, double scale,
                        double lr, int n_iters, int batch_size, std::uint64_t seed);

// Deterministic map from a learned 3-vector to a crafted update.
// rl_untargeted: a1 * (-mean) + a2 * (std ⊙ unit(mean)) + a3 * mean
//   (inversion magnitude, spread exploitation, camouflage).
// rl_backdoor: backdoor_update rescaled to L2 norm a3, then multiplied by
//   (1 + a1); a2 is consumed earlier as the crafting lambda override.
ParamVec rl_attack_apply(const std::array<double, 3>& action, const ParamVec& benign_mean,
                         const ParamVec& benign_std, AttackKind kind,
                         const ParamVec* backdoor_update = nullptr);

}  // namespace metafl
