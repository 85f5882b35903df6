#pragma once

#include <vector>

#include "metafl/vec.hpp"

// Naive reference implementations of the robust aggregators, written
// independently of the fast paths in aggregation.cpp. They back the
// oracle-equivalence checks in the test suite and the `agg-bench` CLI
// self-test; keep them simple and obviously correct, not fast.
namespace metafl::reference {

ParamVec trimmed_mean_naive(const std::vector<ParamVec>& updates, double trim_fraction);

ParamVec coordinate_median_naive(const std::vector<ParamVec>& updates);

std::vector<double> krum_scores_naive(const std::vector<ParamVec>& updates, int f_count);

int krum_index_naive(const std::vector<ParamVec>& updates, int f_count);

}  // namespace metafl::reference
