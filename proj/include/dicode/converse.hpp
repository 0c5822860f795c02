#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dicode/error_analysis.hpp"

namespace dicode {

struct ConverseConfig {
  double b = 0.25;
  double eps_prime = 0.0;     // minimum per-coordinate gap an achievable code must exceed
  double kappa_target = 0.5;  // slack level a demo is reported against

  static ConverseConfig derive(double P_max, int n, double b, double kappa_target = 0.5) {
    if (n < 1 || !(P_max > 0.0) || !(b > 0.0))
      throw std::invalid_argument("ConverseConfig: bad arguments");
    if (!(kappa_target > 0.0 && kappa_target < 1.0))
      throw std::invalid_argument("ConverseConfig: kappa_target must be in (0,1)");
    ConverseConfig cfg;
    cfg.b = b;
    cfg.eps_prime = P_max / std::pow(static_cast<double>(n), 1.0 + b);
    cfg.kappa_target = kappa_target;
    return cfg;
  }
};

inline double linf_distance(const ReleaseVector& u, const ReleaseVector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("linf_distance: length mismatch");
  double best = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) best = std::max(best, std::fabs(u[t] - v[t]));
  return best;
}

struct MinDistanceReport {
  double eps_prime = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<std::pair<std::size_t, std::size_t>> offending;  // linf <= eps_prime
  bool ok() const { return offending.empty(); }
};

// Every codeword pair must have some coordinate differing by more than
// eps_prime; pairs that do not are returned.
inline MinDistanceReport min_distance_check(const Codebook& cb, double eps_prime) {
  if (cb.size() < 2) throw std::invalid_argument("min_distance_check: need at least two codewords");
  MinDistanceReport rep;
  rep.eps_prime = eps_prime;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    for (std::size_t j = i + 1; j < cb.size(); ++j) {
      ++rep.pairs_checked;
      if (linf_distance(cb.codewords[i], cb.codewords[j]) <= eps_prime)
        rep.offending.emplace_back(i, j);
    }
  }
  return rep;
}

struct GammaRatioBounds {
  double lower = 0.0;
  double upper = 0.0;
  double exact = 0.0;  // (Gamma(a)/Gamma(b))^{1/(a-b)}
};

// Double inequality for the Gamma-function mean: for 0 < a < b,
//   min{a, (a+b-1)/2} <= (Gamma(a)/Gamma(b))^{1/(a-b)} <= max{a, (a+b-1)/2}.
inline GammaRatioBounds gamma_ratio_bounds(double a, double b) {
  if (!(a > 0.0) || !(b > a)) throw std::domain_error("gamma_ratio_bounds: need 0 < a < b");
  GammaRatioBounds g;
  const double mid = (a + b - 1.0) / 2.0;
  g.lower = std::min(a, mid);
  g.upper = std::max(a, mid);
  const double log_exact = (std::lgamma(a) - std::lgamma(b)) / (a - b);
  if (!std::isfinite(log_exact)) throw std::domain_error("gamma_ratio_bounds: log-gamma overflow");
  g.exact = std::exp(log_exact);
  return g;
}

namespace detail {

// log bounds and log value for Gamma(u)/Gamma(v), u,v >= 1
struct LogRatioTerm {
  double lo, hi, exact;
};

inline LogRatioTerm log_gamma_ratio_term(double u, double v) {
  LogRatioTerm r{0.0, 0.0, std::lgamma(u) - std::lgamma(v)};
  if (u == v) return r;
  const double alpha = std::min(u, v);
  const double beta = std::max(u, v);
  const double mid = (alpha + beta - 1.0) / 2.0;
  const double log_m = std::log(std::min(alpha, mid));
  const double log_M = std::log(std::max(alpha, mid));
  if (u > v) {  // Gamma(beta)/Gamma(alpha) in [m, M]^{beta-alpha}
    r.lo = (beta - alpha) * log_m;
    r.hi = (beta - alpha) * log_M;
  } else {  // Gamma(alpha)/Gamma(beta) in [M, m]^{alpha-beta}
    r.lo = (alpha - beta) * log_M;
    r.hi = (alpha - beta) * log_m;
  }
  return r;
}

}  // namespace detail

struct LikelihoodRatioBounds {
  double log_lower = 0.0;
  double log_upper = 0.0;
  double log_exact = 0.0;
  double lower() const { return std::exp(log_lower); }
  double upper() const { return std::exp(log_upper); }
  double exact() const { return std::exp(log_exact); }
};

// Exact value and a sandwiching interval for
//   prod_t [ (T c2_t)! / (T c1_t)! ] [ (T c1_t - y_t)! / (T c2_t - y_t)! ] (1-p)^{T (c2_t - c1_t)}
// which equals W^n(y|c2) / W^n(y|c1). Real-valued products T c are read as
// Gamma(x+1). Requires the pair to satisfy the per-coordinate closeness
// hypothesis and y to be feasible under both codewords.
inline LikelihoodRatioBounds likelihood_ratio_product_bounds(const ReleaseVector& c1,
                                                             const ReleaseVector& c2,
                                                             const ObservationVector& y,
                                                             const ChannelParams& params,
                                                             double eps_prime) {
  if (c1.size() != c2.size() || c1.size() != y.size())
    throw std::invalid_argument("likelihood_ratio_product_bounds: length mismatch");
  const double T = params.T_s;
  const double log1mp = std::log1p(-params.p);
  LikelihoodRatioBounds out;
  for (std::size_t t = 0; t < c1.size(); ++t) {
    if (std::fabs(c1[t] - c2[t]) > eps_prime * (1.0 + 1e-12))
      throw std::invalid_argument(
          "likelihood_ratio_product_bounds: pair violates the closeness hypothesis");
    const double N1 = T * c1[t];
    const double N2 = T * c2[t];
    const double yt = static_cast<double>(y[t]);
    if (yt > N1 * (1.0 + 1e-12) + 1e-9 || yt > N2 * (1.0 + 1e-12) + 1e-9)
      throw std::domain_error("likelihood_ratio_product_bounds: y outside both supports");
    const auto f1 = detail::log_gamma_ratio_term(N2 + 1.0, N1 + 1.0);
    const auto f2 = detail::log_gamma_ratio_term(std::max(N1 - yt, 0.0) + 1.0,
                                                 std::max(N2 - yt, 0.0) + 1.0);
    const double f3 = (N2 - N1) * log1mp;
    out.log_lower += f1.lo + f2.lo + f3;
    out.log_upper += f1.hi + f2.hi + f3;
    out.log_exact += f1.exact + f2.exact + f3;
  }
  return out;
}

struct KappaReport {
  double kappa = 0.0;               // 2 A T_s * T_s P_max / n^b
  double bernoulli_exponent = 0.0;  // T_s P_max / n^b
  bool bernoulli_valid = false;     // linearization step needs exponent <= 1
};

inline KappaReport converse_kappa(const ChannelParams& params, int n, double b) {
  if (n < 1 || !(b > 0.0)) throw std::invalid_argument("converse_kappa: bad arguments");
  KappaReport k;
  const double nb = std::pow(static_cast<double>(n), b);
  k.bernoulli_exponent = params.T_s * params.P_max / nb;
  k.kappa = 2.0 * params.amplitude() * params.T_s * params.T_s * params.P_max / nb;
  k.bernoulli_valid = k.bernoulli_exponent <= 1.0;
  return k;
}

struct ContradictionReport {
  double type1 = 0.0, type1_se = 0.0;
  double type2 = 0.0, type2_se = 0.0;
  double kappa = 0.0;
  double threshold = 0.0;  // 1 - kappa - 3 * combined std err
  bool ok = false;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  double sum() const { return type1 + type2; }
  double sum_se() const { return std::sqrt(type1_se * type1_se + type2_se * type2_se); }
};

// For a pair too close per the minimum-distance property, the decoder for c1
// cannot separate the hypotheses: P_e1(1) + P_e2(2,1) stays near one. Trial k
// reuses substream k for both draws, so identical codewords give a sum of
// exactly one.
inline ContradictionReport converse_contradiction_demo(const ReleaseVector& c1,
                                                       const ReleaseVector& c2,
                                                       const ChannelParams& params,
                                                       const ConverseConfig& conv,
                                                       const DecoderConfig& dec,
                                                       std::uint64_t trials, std::uint64_t seed,
                                                       int threads = 1) {
  if (c1.size() != c2.size())
    throw std::invalid_argument("converse_contradiction_demo: length mismatch");
  if (linf_distance(c1, c2) > conv.eps_prime * (1.0 + 1e-12))
    throw std::invalid_argument(
        "converse_contradiction_demo: pair does not violate the minimum-distance property");
  if (trials < 100) throw std::invalid_argument("converse_contradiction_demo: trials must be >= 100");
  if (trials >= (1ull << 32))
    throw std::invalid_argument("converse_contradiction_demo: trial count exceeds counter packing");

  const std::size_t n = c1.size();
  const CodewordSampler s1(c1, params);
  const CodewordSampler s2(c2, params);

  std::uint64_t rejects = 0, accepts = 0;
  auto count_pair = [&](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t rej = 0, acc = 0;
    ObservationVector y;
    for (std::uint64_t t = lo; t < hi; ++t) {
      Rng r1 = Rng::substream(seed, t);
      s1.draw(r1, y);
      if (std::fabs(decoding_metric(y, c1, params, dec.mode)) > dec.delta_n) ++rej;
      Rng r2 = Rng::substream(seed, t);
      s2.draw(r2, y);
      if (std::fabs(decoding_metric(y, c1, params, dec.mode)) <= dec.delta_n) ++acc;
    }
    return (rej << 32) | acc;  // acc, rej both <= hi-lo < 2^32 at desk scale
  };
  if (threads <= 1 || trials < 2) {
    const std::uint64_t packed = count_pair(0, trials);
    rejects = packed >> 32;
    accepts = packed & 0xFFFFFFFFull;
  } else {
    std::vector<std::uint64_t> packed(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    const std::uint64_t base = trials / static_cast<std::uint64_t>(threads);
    const std::uint64_t rem = trials % static_cast<std::uint64_t>(threads);
    std::uint64_t begin = 0;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t len = base + (static_cast<std::uint64_t>(t) < rem ? 1 : 0);
      pool.emplace_back(
          [&, t, begin, len] { packed[static_cast<std::size_t>(t)] = count_pair(begin, begin + len); });
      begin += len;
    }
    for (auto& th : pool) th.join();
    for (auto pk : packed) {
      rejects += pk >> 32;
      accepts += pk & 0xFFFFFFFFull;
    }
  }

  ContradictionReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.type1 = static_cast<double>(rejects) / static_cast<double>(trials);
  rep.type2 = static_cast<double>(accepts) / static_cast<double>(trials);
  rep.type1_se = binomial_proportion_std_err(rep.type1, trials);
  rep.type2_se = binomial_proportion_std_err(rep.type2, trials);
  rep.kappa = converse_kappa(params, static_cast<int>(n), conv.b).kappa;
  rep.threshold = 1.0 - rep.kappa - 3.0 * rep.sum_se();
  rep.ok = rep.sum() >= rep.threshold;
  return rep;
}

// (1+y)^r <= 1 + r y, the linearization used when collapsing the case bounds
// to 1 +/- kappa; only valid for 0 <= r <= 1, y >= -1.
inline bool bernoulli_inequality_holds(double y, double r) {
  return std::pow(1.0 + y, r) <= 1.0 + r * y + 1e-12;
}

}  // namespace dicode
