#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "metafl/vec.hpp"

namespace metafl {

struct Sample {
  std::vector<double> features;
  int label = 0;
};

// One client's local dataset. poisoned[i] marks samples that carry an
// embedded trigger; any set flag means the shard belongs to a malicious
// client.
struct ClientShard {
  std::vector<Sample> samples;
  std::vector<std::uint8_t> poisoned;
  int client_id = 0;

  bool is_malicious() const {
    for (auto f : poisoned)
      if (f) return true;
    return false;
  }
};

// Feature-space trigger: masked coordinates are replaced by the pattern
// values and the label is forced to target_label.
struct TriggerSpec {
  std::vector<std::uint8_t> mask;
  std::vector<double> pattern;
  int target_label = 0;
};

// C Gaussian blobs (unit variance), class c centered so that pairwise
// center distance >= class_separation. Samples ordered class by class.
std::vector<Sample> gen_synthetic_dataset(int dim, int classes, int n_per_class,
                                          double class_separation, std::uint64_t seed);

// Heterogeneous split: a sample with label c goes to group (c mod n_groups)
// with probability q and to a uniformly random group otherwise; within a
// group, samples are spread uniformly over the group's clients.
// n_clients must be divisible by n_groups.
std::vector<ClientShard> split_non_iid(const std::vector<Sample>& dataset, int n_clients,
                                       int n_groups, double q, std::uint64_t seed);

Sample apply_trigger(const Sample& sample, const TriggerSpec& trigger);

// Triggers a poison_ratio fraction of the shard in place (rounded up so at
// least one sample is poisoned when ratio > 0) and sets the flags.
void poison_shard(ClientShard& shard, const TriggerSpec& trigger, double poison_ratio,
                  std::uint64_t seed);

// Debug dump format: "dim C" header line, then one sample per line as
// comma-separated features, label, poisoned flag.
void write_samples(std::ostream& os, int dim, int classes,
                   const std::vector<Sample>& samples,
                   const std::vector<std::uint8_t>* poisoned = nullptr);
struct SampleDump {
  int dim = 0;
  int classes = 0;
  std::vector<Sample> samples;
  std::vector<std::uint8_t> poisoned;
};
SampleDump read_samples(std::istream& is);

}  // namespace metafl
