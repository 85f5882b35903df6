#include "metafl/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "metafl/rng.hpp"

namespace metafl {

namespace {

// Deterministic center layout: class c sits on axis (c mod dim) at radius
// (1 + c/dim) * separation. Any two centers are at least `separation` apart.
std::vector<double> class_center(int dim, int c, double separation) {
  std::vector<double> center(dim, 0.0);
  center[c % dim] = separation * (1.0 + static_cast<double>(c / dim));
  return center;
}

}  // namespace

std::vector<Sample> gen_synthetic_dataset(int dim, int classes, int n_per_class,
                                          double class_separation, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("gen_synthetic_dataset: dim must be >= 1");
  if (classes < 2) throw std::invalid_argument("gen_synthetic_dataset: classes must be >= 2");
  if (n_per_class < 1)
    throw std::invalid_argument("gen_synthetic_dataset: n_per_class must be >= 1");

  auto engine = make_engine(derive(seed, "blobs"));
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(classes) * n_per_class);
  for (int c = 0; c < classes; ++c) {
    const auto center = class_center(dim, c, class_separation);
    for (int i = 0; i < n_per_class; ++i) {
      Sample s;
      s.label = c;
      s.features.resize(dim);
      for (int d = 0; d < dim; ++d) s.features[d] = center[d] + noise(engine);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<ClientShard> split_non_iid(const std::vector<Sample>& dataset, int n_clients,
                                       int n_groups, double q, std::uint64_t seed) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("split_non_iid: q outside [0,1]");
  if (n_clients < 1 || n_groups < 1 || n_clients % n_groups != 0)
    throw std::invalid_argument("split_non_iid: n_clients must divide into n_groups groups");

  const int per_group = n_clients / n_groups;
  auto engine = make_engine(derive(seed, "split"));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_group(0, n_groups - 1);
  std::uniform_int_distribution<int> within(0, per_group - 1);

  std::vector<ClientShard> shards(n_clients);
  for (int i = 0; i < n_clients; ++i) shards[i].client_id = i;

  for (const Sample& s : dataset) {
    int group = (coin(engine) < q) ? (s.label % n_groups) : any_group(engine);
    int client = group * per_group + within(engine);
    shards[client].samples.push_back(s);
    shards[client].poisoned.push_back(0);
  }
  return shards;
}

Sample apply_trigger(const Sample& sample, const TriggerSpec& trigger) {
  require_same_dim(sample.features.size(), trigger.mask.size(), "apply_trigger mask");
  require_same_dim(sample.features.size(), trigger.pattern.size(), "apply_trigger pattern");
  Sample out = sample;
  for (std::size_t d = 0; d < out.features.size(); ++d)
    if (trigger.mask[d]) out.features[d] = trigger.pattern[d];
  out.label = trigger.target_label;
  return out;
}

void poison_shard(ClientShard& shard, const TriggerSpec& trigger, double poison_ratio,
                  std::uint64_t seed) {
  if (poison_ratio < 0.0 || poison_ratio > 1.0)
    throw std::invalid_argument("poison_shard: ratio outside [0,1]");
  const std::size_t n = shard.samples.size();
  shard.poisoned.assign(n, 0);
  if (poison_ratio == 0.0 || n == 0) return;

  std::size_t k = static_cast<std::size_t>(std::min<double>(
      static_cast<double>(n), std::ceil(poison_ratio * static_cast<double>(n))));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto engine = make_engine(derive(seed, "poison"));
  std::shuffle(idx.begin(), idx.end(), engine);
  for (std::size_t i = 0; i < k; ++i) {
    shard.samples[idx[i]] = apply_trigger(shard.samples[idx[i]], trigger);
    shard.poisoned[idx[i]] = 1;
  }
}

void write_samples(std::ostream& os, int dim, int classes,
                   const std::vector<Sample>& samples,
                   const std::vector<std::uint8_t>* poisoned) {
  os << dim << ' ' << classes << '\n';
  char buf[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    for (double f : s.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", f);
      os << buf << ',';
    }
    os << s.label << ',' << (poisoned && (*poisoned)[i] ? 1 : 0) << '\n';
  }
}

SampleDump read_samples(std::istream& is) {
  SampleDump dump;
  if (!(is >> dump.dim >> dump.classes))
    throw std::runtime_error("read_samples: bad header line");
  std::string line;
  std::getline(is, line);  // finish header line
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Sample s;
    for (int d = 0; d < dump.dim; ++d) {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("read_samples: short line");
      s.features.push_back(std::stod(field));
    }
    if (!std::getline(ss, field, ',')) throw std::runtime_error("read_samples: missing label");
    s.label = std::stoi(field);
    if (!std::getline(ss, field, ',')) throw std::runtime_error("read_samples: missing flag");
    dump.poisoned.push_back(static_cast<std::uint8_t>(std::stoi(field)));
    dump.samples.push_back(std::move(s));
  }
  return dump;
}

}  // namespace metafl
