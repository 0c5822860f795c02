#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "dicode/codec.hpp"

namespace dicode {

struct ErrorEstimate {
  enum class Kind { Type1, Type2 };
  Kind kind = Kind::Type1;
  std::size_t i = 0;
  std::size_t j = 0;  // equals i for type I
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

inline double binomial_proportion_std_err(double estimate, std::uint64_t trials) {
  return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
}

struct MetricMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Exact mean and variance of T(Y, c) under Y ~ channel(c), from closed-form
// Binomial central moments. In exact-floor mode the per-symbol mean cancels
// identically, so the total mean is 0.0 with no rounding residue.
inline MetricMoments metric_moments(const ReleaseVector& c, const ChannelParams& params,
                                    MetricMode mode) {
  const double p = params.p;
  const double q = 1.0 - p;
  MetricMoments mm;
  for (double rate : c) {
    const double N = static_cast<double>(params.molecule_count(rate));
    const double mu2 = N * p * q;
    const double mu3 = N * p * q * (q - p);
    const double mu4 = 3.0 * mu2 * mu2 + mu2 * (1.0 - 6.0 * p * q);
    const double mu_used = metric_mean_term(rate, params, mode);
    const double shift = N * p - mu_used;  // 0 in exact-floor mode
    const double beta = 2.0 * shift - q;
    mm.mean += mu2 + shift * shift - q * (N * p);
    mm.variance += mu4 - mu2 * mu2 + 2.0 * beta * mu3 + beta * beta * mu2;
  }
  const double n = static_cast<double>(c.size());
  mm.mean /= n;
  mm.variance /= n * n;
  return mm;
}

// Chebyshev-derived closed form for the type I error probability:
// [A^4 T^4 e^{8/(pTc)} + (2AT+1)^2 AT + (2AT+1) A^2 T^2 sqrt(e^{8/(pTc)} AT)] / n^b
// with c the reference codeword amplitude. Diverges as c -> 0.
inline double analytic_type1_bound(const ChannelParams& params, int n, double b, double c_ref) {
  if (!(c_ref > 0.0)) throw std::domain_error("analytic_type1_bound: c_ref must be positive");
  if (n < 1 || !(b > 0.0 && b < 1.0))
    throw std::invalid_argument("analytic_type1_bound: bad n or b");
  const double A = params.amplitude();
  const double T = params.T_s;
  const double AT = A * T;
  const double e8 = std::exp(8.0 / (params.p * T * c_ref));
  const double numerator = AT * AT * AT * AT * e8 + (2.0 * AT + 1.0) * (2.0 * AT + 1.0) * AT +
                           (2.0 * AT + 1.0) * AT * AT * std::sqrt(e8 * AT);
  return numerator / std::pow(static_cast<double>(n), b);
}

// 4 A^3 T^3 p^3 (1-p) / n^b: cross-term event probability bound
inline double zeta0(const ChannelParams& params, int n, double b) {
  if (n < 1 || !(b > 0.0 && b < 1.0)) throw std::invalid_argument("zeta0: bad n or b");
  const double ATp = params.amplitude() * params.T_s * params.p;
  return 4.0 * ATp * ATp * ATp * (1.0 - params.p) / std::pow(static_cast<double>(n), b);
}

// quadratic-term event probability bound; same closed form as the type I case
inline double zeta1(const ChannelParams& params, int n, double b, double c_ref) {
  return analytic_type1_bound(params, n, b, c_ref);
}

struct AnalyticBounds {
  double type1_bound = 0.0;
  double zeta0 = 0.0;
  double zeta1 = 0.0;
  double type2_bound = 0.0;  // zeta0 + zeta1
  double c_ref = 0.0;
};

inline AnalyticBounds make_analytic_bounds(const ChannelParams& params, int n, double b,
                                           double c_ref) {
  AnalyticBounds ab;
  ab.c_ref = c_ref;
  ab.type1_bound = analytic_type1_bound(params, n, b, c_ref);
  ab.zeta0 = dicode::zeta0(params, n, b);
  ab.zeta1 = dicode::zeta1(params, n, b, c_ref);
  ab.type2_bound = ab.zeta0 + ab.zeta1;
  return ab;
}

// smallest strictly positive coordinate across the codebook; +inf if none
inline double min_positive_coordinate(const Codebook& cb) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cb.codewords)
    for (double v : c)
      if (v > 0.0 && v < best) best = v;
  return best;
}

namespace detail {

template <class Accept>
ErrorEstimate mc_error_estimate(ErrorEstimate::Kind kind, std::size_t i, std::size_t j,
                                const Codebook& cb, const ChannelParams& params,
                                std::uint64_t trials, std::uint64_t seed, int threads,
                                Accept&& accept) {
  const CodewordSampler sampler(cb.codewords[i], params);
  const std::uint64_t count =
      detail::sum_chunked(trials, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t c = 0;
        ObservationVector y;
        for (std::uint64_t t = lo; t < hi; ++t) {
          Rng rng = Rng::substream(seed, t);
          sampler.draw(rng, y);
          if (accept(y)) ++c;
        }
        return c;
      });
  ErrorEstimate est;
  est.kind = kind;
  est.i = i;
  est.j = j;
  est.trials = trials;
  est.seed = seed;
  est.estimate = static_cast<double>(count) / static_cast<double>(trials);
  est.std_err = binomial_proportion_std_err(est.estimate, trials);
  return est;
}

}  // namespace detail

// fraction of Y(i) samples rejected by the decoder for the sent message i
inline ErrorEstimate mc_type1(std::size_t i, const Codebook& cb, const DecoderConfig& cfg,
                              const ChannelParams& params, std::uint64_t trials,
                              std::uint64_t seed, int threads = 1) {
  if (i >= cb.size()) throw std::out_of_range("mc_type1: index out of range");
  if (trials < 100) throw std::invalid_argument("mc_type1: trials must be >= 100");
  const ReleaseVector& ci = cb.codewords[i];
  return detail::mc_error_estimate(
      ErrorEstimate::Kind::Type1, i, i, cb, params, trials, seed, threads,
      [&](const ObservationVector& y) {
        return std::fabs(decoding_metric(y, ci, params, cfg.mode)) > cfg.delta_n;
      });
}

// fraction of Y(i) samples accepted by the decoder for a wrong target j
inline ErrorEstimate mc_type2(std::size_t i, std::size_t j, const Codebook& cb,
                              const DecoderConfig& cfg, const ChannelParams& params,
                              std::uint64_t trials, std::uint64_t seed, int threads = 1) {
  if (i >= cb.size() || j >= cb.size()) throw std::out_of_range("mc_type2: index out of range");
  if (i == j) throw std::invalid_argument("mc_type2: i and j must differ");
  if (trials < 100) throw std::invalid_argument("mc_type2: trials must be >= 100");
  const ReleaseVector& cj = cb.codewords[j];
  return detail::mc_error_estimate(
      ErrorEstimate::Kind::Type2, i, j, cb, params, trials, seed, threads,
      [&](const ObservationVector& y) {
        return std::fabs(decoding_metric(y, cj, params, cfg.mode)) <= cfg.delta_n;
      });
}

struct EventFrequencies {
  double e0 = 0.0;        // |cross term| > n delta
  double e1 = 0.0;        // quadratic + separation - linear <= 2 n delta
  double eij_prime = 0.0; // un-normalized acceptance event for target j
  std::uint64_t trials = 0;
};

// Monte Carlo frequencies of the decomposition events for Y ~ channel(c_i)
// against target c_j, in the decoder's metric mode.
inline EventFrequencies mc_event_frequencies(std::size_t i, std::size_t j, const Codebook& cb,
                                             const DecoderConfig& cfg, const ChannelParams& params,
                                             std::uint64_t trials, std::uint64_t seed,
                                             int threads = 1) {
  if (i >= cb.size() || j >= cb.size())
    throw std::out_of_range("mc_event_frequencies: index out of range");
  if (i == j) throw std::invalid_argument("mc_event_frequencies: i and j must differ");
  if (trials < 1) throw std::invalid_argument("mc_event_frequencies: trials must be >= 1");

  const ReleaseVector& ci = cb.codewords[i];
  const ReleaseVector& cj = cb.codewords[j];
  const std::size_t n = ci.size();
  const double ndelta = static_cast<double>(n) * cfg.delta_n;
  std::vector<double> mu_i(n), shift(n);
  double shift_sq = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mu_i[t] = metric_mean_term(ci[t], params, cfg.mode);
    shift[t] = mu_i[t] - metric_mean_term(cj[t], params, cfg.mode);
    shift_sq += shift[t] * shift[t];
  }

  const CodewordSampler sampler(ci, params);
  std::uint64_t c0 = 0, c1 = 0, cp = 0;
  auto run = [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t& k0, std::uint64_t& k1,
                 std::uint64_t& kp) {
    ObservationVector y;
    for (std::uint64_t t = lo; t < hi; ++t) {
      Rng rng = Rng::substream(seed, t);
      sampler.draw(rng, y);
      double cross = 0.0, sq = 0.0, lin = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const double dev = static_cast<double>(y[s]) - mu_i[s];
        cross += dev * shift[s];
        sq += dev * dev;
        lin += (1.0 - params.p) * static_cast<double>(y[s]);
      }
      if (std::fabs(cross) > ndelta) ++k0;
      if (sq + shift_sq - lin <= 2.0 * ndelta) ++k1;
      if (sq + shift_sq + 2.0 * cross - lin <= ndelta) ++kp;
    }
  };
  // single pass; three counters share the samples, so run serially per chunk
  if (threads <= 1) {
    run(0, trials, c0, c1, cp);
  } else {
    std::vector<std::uint64_t> k0(static_cast<std::size_t>(threads), 0),
        k1(static_cast<std::size_t>(threads), 0), kp(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    const std::uint64_t base = trials / static_cast<std::uint64_t>(threads);
    const std::uint64_t rem = trials % static_cast<std::uint64_t>(threads);
    std::uint64_t begin = 0;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t len = base + (static_cast<std::uint64_t>(t) < rem ? 1 : 0);
      pool.emplace_back([&, t, begin, len] {
        run(begin, begin + len, k0[static_cast<std::size_t>(t)], k1[static_cast<std::size_t>(t)],
            kp[static_cast<std::size_t>(t)]);
      });
      begin += len;
    }
    for (auto& th : pool) th.join();
    for (int t = 0; t < threads; ++t) {
      c0 += k0[static_cast<std::size_t>(t)];
      c1 += k1[static_cast<std::size_t>(t)];
      cp += kp[static_cast<std::size_t>(t)];
    }
  }

  EventFrequencies ef;
  ef.trials = trials;
  ef.e0 = static_cast<double>(c0) / static_cast<double>(trials);
  ef.e1 = static_cast<double>(c1) / static_cast<double>(trials);
  ef.eij_prime = static_cast<double>(cp) / static_cast<double>(trials);
  return ef;
}

}  // namespace dicode
