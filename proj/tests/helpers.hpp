#pragma once

// Test-side oracles, kept independent of the library code paths they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "dicode/channel.hpp"
#include "dicode/special.hpp"

namespace testutil {

// Binomial pmf by exact rational coefficient accumulation (small N only).
inline double pmf_oracle(int N, double p, int y) {
  if (y < 0 || y > N) return 0.0;
  double coeff = 1.0;
  for (int i = 0; i < y; ++i) coeff = coeff * (N - i) / (i + 1);
  return coeff * std::pow(p, y) * std::pow(1.0 - p, N - y);
}

// raw moment E[Y^k] by full-support summation
inline double moment_oracle(int N, double p, int k) {
  double s = 0.0;
  for (int y = 0; y <= N; ++y) s += pmf_oracle(N, p, y) * std::pow(static_cast<double>(y), k);
  return s;
}

struct GofResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Pearson chi-square against expected counts, pooling cells with expectation
// below 5 into their left neighbor.
inline GofResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& expected) {
  GofResult r;
  double obs_pool = 0.0, exp_pool = 0.0;
  int cells = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    obs_pool += static_cast<double>(observed[k]);
    exp_pool += expected[k];
    const bool last = k + 1 == observed.size();
    if (exp_pool >= 5.0 || (last && cells > 0)) {
      const double d = obs_pool - exp_pool;
      r.statistic += d * d / exp_pool;
      ++cells;
      obs_pool = exp_pool = 0.0;
    }
  }
  r.dof = cells > 1 ? cells - 1 : 1;
  r.p_value = dicode::chi_square_survival(r.statistic, r.dof);
  return r;
}

// Draws `samples` variates from the sampler for Binomial(N, p) and tests the
// empirical histogram against exp(log_pmf).
inline GofResult sampler_gof(int N, double p, std::uint64_t samples, std::uint64_t seed) {
  dicode::BinomialSampler sampler(N, p);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(N) + 1, 0);
  for (std::uint64_t t = 0; t < samples; ++t) {
    dicode::Rng rng = dicode::Rng::substream(seed, t);
    ++counts[static_cast<std::size_t>(sampler.draw(rng))];
  }
  std::vector<double> expected(counts.size());
  for (int y = 0; y <= N; ++y)
    expected[static_cast<std::size_t>(y)] =
        static_cast<double>(samples) * std::exp(dicode::log_pmf(N, p, y));
  return chi_square_gof(counts, expected);
}

// Two codewords on levels {lo, hi} differing in exactly `flips` coordinates.
inline std::pair<dicode::ReleaseVector, dicode::ReleaseVector> two_level_pair(
    int n, double lo, double hi, int flips, dicode::Rng& rng) {
  dicode::ReleaseVector ci(static_cast<std::size_t>(n));
  for (auto& v : ci) v = rng.uniform01() < 0.5 ? lo : hi;
  dicode::ReleaseVector cj = ci;
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) idx[static_cast<std::size_t>(t)] = t;
  for (int t = 0; t < flips; ++t) {
    const auto pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
    auto& v = cj[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
    v = v == lo ? hi : lo;
  }
  return {ci, cj};
}

}  // namespace testutil
