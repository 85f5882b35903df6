#include "metafl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metafl::reference {

ParamVec trimmed_mean_naive(const std::vector<ParamVec>& updates, double trim_fraction) {
  if (updates.empty()) throw std::invalid_argument("trimmed_mean_naive: no updates");
  const std::size_t n = updates.size();
  const std::size_t dim = updates.front().size();
  const auto k = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));

  ParamVec out(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<double> col;
    for (const auto& u : updates) col.push_back(u[d]);
    std::sort(col.begin(), col.end());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = k; i + k < n; ++i) {
      sum += col[i];
      ++count;
    }
    out[d] = sum / static_cast<double>(count);
  }
  return out;
}

ParamVec coordinate_median_naive(const std::vector<ParamVec>& updates) {
  if (updates.empty()) throw std::invalid_argument("coordinate_median_naive: no updates");
  const std::size_t n = updates.size();
  const std::size_t dim = updates.front().size();
  ParamVec out(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<double> col;
    for (const auto& u : updates) col.push_back(u[d]);
    std::sort(col.begin(), col.end());
    out[d] = (n % 2 == 1) ? col[(n - 1) / 2] : (col[n / 2 - 1] + col[n / 2]) / 2.0;
  }
  return out;
}

std::vector<double> krum_scores_naive(const std::vector<ParamVec>& updates, int f_count) {
  const int n = static_cast<int>(updates.size());
  if (n < f_count + 3) throw std::invalid_argument("krum_scores_naive: too few updates");
  const int neighbors = n - f_count - 2;

  std::vector<double> scores(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> d2;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t d = 0; d < updates[i].size(); ++d)
        s += (updates[i][d] - updates[j][d]) * (updates[i][d] - updates[j][d]);
      d2.push_back(s);
    }
    std::sort(d2.begin(), d2.end());
    for (int m = 0; m < neighbors; ++m) scores[i] += d2[m];
  }
  return scores;
}

int krum_index_naive(const std::vector<ParamVec>& updates, int f_count) {
  auto scores = krum_scores_naive(updates, f_count);
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i] < scores[best]) best = i;
  return best;
}

}  // namespace metafl::reference
