#include "metafl/rng.hpp"

namespace metafl {

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a, then mixed so short labels diverge.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return mix64(h);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag));
}

std::uint64_t derive(std::uint64_t seed, std::string_view label) {
  return derive(seed, hash_label(label));
}

std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t i) {
  return derive(derive(seed, label), i);
}

std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t i,
                     std::uint64_t j) {
  return derive(derive(derive(seed, label), i), j);
}

}  // namespace metafl
