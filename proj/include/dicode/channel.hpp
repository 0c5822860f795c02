#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dicode/rng.hpp"
#include "dicode/special.hpp"

namespace dicode {

using ReleaseVector = std::vector<double>;   // molecule release rates per channel use
using ObservationVector = std::vector<int>;  // molecule counts per channel use

class InvalidGeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Capture probability for free diffusion to a transparent receiver:
//   V_rx / (4 pi D tau)^{3/2} * exp(-d^2 / (4 D tau)).
// d == 0 is the co-located limit; a result >= 1 is not a probability and is
// rejected as invalid geometry.
inline double capture_probability(double V_rx, double D, double d, double tau) {
  if (!(V_rx > 0.0) || !(D > 0.0) || !(tau > 0.0) || !(d >= 0.0) || !std::isfinite(d))
    throw std::domain_error("capture_probability: arguments must be positive (d may be zero)");
  const double denom = std::pow(4.0 * M_PI * D * tau, 1.5);
  const double p = V_rx / denom * std::exp(-d * d / (4.0 * D * tau));
  if (p >= 1.0)
    throw InvalidGeometryError("capture_probability: result >= 1, geometry yields no valid channel");
  return p;
}

struct ChannelParams {
  double p;      // per-molecule capture probability, 0 < p < 1
  double T_s;    // symbol duration
  double P_max;  // peak release rate
  double P_ave;  // average release rate

  ChannelParams(double p_, double T_s_, double P_max_, double P_ave_)
      : p(p_), T_s(T_s_), P_max(P_max_), P_ave(P_ave_) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ChannelParams: p must be in (0,1)");
    if (!(T_s > 0.0)) throw std::domain_error("ChannelParams: T_s must be positive");
    if (!(P_max > 0.0)) throw std::domain_error("ChannelParams: P_max must be positive");
    if (!(P_ave > 0.0)) throw std::domain_error("ChannelParams: P_ave must be positive");
  }

  // effective codeword amplitude; never stored, so it cannot go stale
  double amplitude() const { return std::min(P_max, P_ave); }

  int molecule_count(double rate) const {
    return static_cast<int>(std::floor(T_s * rate));
  }
};

// log Binom(N, p) pmf at y; -inf when y > N
inline double log_pmf(long long N, double p, long long y) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("log_pmf: p must be in (0,1)");
  if (N < 0 || y < 0) throw std::domain_error("log_pmf: counts must be nonnegative");
  if (y > N) return -std::numeric_limits<double>::infinity();
  return log_binomial_coefficient(N, y) + static_cast<double>(y) * std::log(p) +
         static_cast<double>(N - y) * std::log1p(-p);
}

inline double n_use_log_likelihood(const ReleaseVector& x, const ObservationVector& y,
                                   const ChannelParams& params) {
  if (x.size() != y.size())
    throw std::invalid_argument("n_use_log_likelihood: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t)
    sum += log_pmf(params.molecule_count(x[t]), params.p, y[t]);
  return sum;
}

// Inverse-CDF sampler for a fixed Binomial(N, p). The cdf table is built once
// through the log-domain pmf recurrence; each draw consumes one uniform.
class BinomialSampler {
 public:
  BinomialSampler(int N, double p) : n_(N) {
    if (N < 0) throw std::domain_error("BinomialSampler: N must be nonnegative");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("BinomialSampler: p must be in (0,1)");
    cdf_.resize(static_cast<std::size_t>(N) + 1);
    const double logp = std::log(p);
    const double log1mp = std::log1p(-p);
    double lp = N * log1mp;
    double logcdf = lp;
    cdf_[0] = std::exp(logcdf);
    for (int k = 1; k <= N; ++k) {
      lp += std::log(static_cast<double>(N - k + 1) / k) + logp - log1mp;
      logcdf = logaddexp(logcdf, lp);
      cdf_[static_cast<std::size_t>(k)] = std::exp(logcdf);
    }
    cdf_.back() = std::max(cdf_.back(), 1.0);
  }

  int trials() const { return n_; }

  int draw(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? n_ : static_cast<int>(it - cdf_.begin());
  }

 private:
  int n_;
  std::vector<double> cdf_;
};

// Per-symbol samplers for one codeword, sharing tables across equal counts.
class CodewordSampler {
 public:
  CodewordSampler(const ReleaseVector& x, const ChannelParams& params) {
    index_.reserve(x.size());
    std::vector<int> counts;
    for (double rate : x) {
      if (!(rate >= 0.0)) throw std::domain_error("CodewordSampler: negative release rate");
      const int N = params.molecule_count(rate);
      auto it = std::find(counts.begin(), counts.end(), N);
      if (it == counts.end()) {
        counts.push_back(N);
        samplers_.emplace_back(N, params.p);
        index_.push_back(samplers_.size() - 1);
      } else {
        index_.push_back(static_cast<std::size_t>(it - counts.begin()));
      }
    }
  }

  std::size_t size() const { return index_.size(); }

  void draw(Rng& rng, ObservationVector& out) const {
    out.resize(index_.size());
    for (std::size_t t = 0; t < index_.size(); ++t)
      out[t] = samplers_[index_[t]].draw(rng);
  }

 private:
  std::vector<BinomialSampler> samplers_;
  std::vector<std::size_t> index_;
};

// One observation vector; Y_t ~ Binomial(floor(T_s x_t), p) independently.
inline ObservationVector sample(const ReleaseVector& x, const ChannelParams& params, Rng& rng) {
  CodewordSampler sampler(x, params);
  ObservationVector y;
  sampler.draw(rng, y);
  return y;
}

// Raw moment E[Y^k] for Y ~ Binomial(N, p), k <= 4, via factorial moments.
inline double binomial_raw_moment(int N, double p, int k) {
  if (N < 0 || k < 1 || k > 4) throw std::domain_error("binomial_raw_moment: need N>=0, 1<=k<=4");
  const double n = N;
  const double f1 = n * p;
  const double f2 = n * (n - 1) * p * p;
  const double f3 = n * (n - 1) * (n - 2) * p * p * p;
  const double f4 = n * (n - 1) * (n - 2) * (n - 3) * p * p * p * p;
  switch (k) {
    case 1: return f1;
    case 2: return f1 + f2;
    case 3: return f1 + 3 * f2 + f3;
    default: return f1 + 7 * f2 + 6 * f3 + f4;
  }
}

struct MomentBoundViolation {
  int N;
  double p;
  int k;
  double moment;
  double bound;
};

// Checks E[Y^k] <= (Np)^k exp(k^2 / (2 Np)) over the grid with Np >= 1.
// Returns every violating cell; analytic error bounds are only trusted on a
// grid this scan has cleared.
inline std::vector<MomentBoundViolation> scan_moment_bound(int N_max,
                                                           const std::vector<double>& ps,
                                                           int k_max = 4) {
  std::vector<MomentBoundViolation> out;
  for (int N = 1; N <= N_max; ++N) {
    for (double p : ps) {
      const double mean = N * p;
      if (mean < 1.0) continue;
      for (int k = 1; k <= k_max; ++k) {
        const double moment = binomial_raw_moment(N, p, k);
        const double bound = std::pow(mean, k) * std::exp(k * k / (2.0 * mean));
        if (moment > bound * (1.0 + 1e-12))
          out.push_back({N, p, k, moment, bound});
      }
    }
  }
  return out;
}

// valid codeword for the given constraints: peak and average release rate
inline bool satisfies_power_constraints(const ReleaseVector& x, const ChannelParams& params) {
  if (x.empty()) return false;
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0) || v > params.P_max * (1.0 + 1e-12)) return false;
    sum += v;
  }
  return sum / static_cast<double>(x.size()) <= params.P_ave * (1.0 + 1e-12);
}

inline ReleaseVector random_release_vector(int n, double lo, double hi, Rng& rng) {
  if (n < 1 || !(lo >= 0.0) || !(hi >= lo))
    throw std::invalid_argument("random_release_vector: bad range");
  ReleaseVector x(static_cast<std::size_t>(n));
  for (auto& v : x) v = lo + (hi - lo) * rng.uniform01();
  return x;
}

}  // namespace dicode
