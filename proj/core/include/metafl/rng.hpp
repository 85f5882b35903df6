#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace metafl {

// SplitMix64 finalizer. Used to turn (seed, tag) pairs into decorrelated
// child seeds so every component owns an independent stream: adding or
// removing draws in one component never shifts the values seen by another.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label);

// Seed-splitting scheme (documented contract, relied on by tests that
// replay training internals):
//   derive(seed, tag)              -> child seed for integer tag
//   derive(seed, label)            -> child seed for named stream
//   derive(seed, label, i)         -> i-th element of named stream
//   derive(seed, label, i, j)      -> (i, j)-th element of named stream
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive(std::uint64_t seed, std::string_view label);
std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t i);
std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t i,
                     std::uint64_t j);

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

}  // namespace metafl
