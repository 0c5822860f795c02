#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dicode/channel.hpp"
#include "dicode/rng.hpp"

namespace dicode {

// Packing constant coupled to the channel so that T_s^2 p^2 eps_n = 3 delta_n.
inline double coupled_packing_constant(double A, double p, double T_s) {
  return 3.0 * A / (p * p * T_s * T_s);
}

struct PackingConfig {
  int n = 2;             // blocklength / dimension
  double a = 1.0;        // packing constant
  double b = 0.25;       // exponent constant in (0,1)
  double A = 1.0;        // cube edge
  double c_min = 0.0;    // coordinate floor applied by clamping
  long long stop_K = -1; // consecutive rejections before stopping; <0 -> 1000*n
  std::uint64_t seed = 1;
  std::uint64_t max_M = 100000;

  double epsilon_n() const { return a / std::pow(static_cast<double>(n), (1.0 - b) / 2.0); }
  double r0() const { return std::sqrt(n * epsilon_n()); }
  long long effective_stop_K() const { return stop_K < 0 ? 1000LL * n : stop_K; }

  void validate() const {
    if (n < 2) throw std::invalid_argument("PackingConfig: n must be >= 2");
    if (!(a > 0.0)) throw std::invalid_argument("PackingConfig: a must be positive");
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("PackingConfig: b must be in (0,1)");
    if (!(A > 0.0)) throw std::invalid_argument("PackingConfig: A must be positive");
    if (!(c_min >= 0.0) || c_min >= A)
      throw std::invalid_argument("PackingConfig: c_min must be in [0, A)");
    if (effective_stop_K() < 1) throw std::invalid_argument("PackingConfig: stop_K must be >= 1");
    if (!(r0() < A * std::sqrt(static_cast<double>(n))))
      throw std::invalid_argument("PackingConfig: r0 must be smaller than the cube diameter");
  }
};

struct Codebook {
  int n = 0;
  double A = 0.0, a = 0.0, b = 0.0, r0 = 0.0, c_min = 0.0;
  std::uint64_t seed = 0;
  long long stop_K = 0;
  std::string method;  // "rsa", "rsa+repair", "manual", "file"
  std::vector<ReleaseVector> codewords;

  // construction statistics
  std::uint64_t candidates = 0;
  std::uint64_t rejected = 0;
  std::uint64_t repaired = 0;
  bool capped = false;

  std::size_t size() const { return codewords.size(); }
};

inline double squared_distance(const ReleaseVector& u, const ReleaseVector& v) {
  double s = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    const double d = u[t] - v[t];
    s += d * d;
  }
  return s;
}

inline double min_pairwise_distance(const Codebook& cb) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cb.size(); ++i)
    for (std::size_t j = i + 1; j < cb.size(); ++j)
      best = std::min(best, squared_distance(cb.codewords[i], cb.codewords[j]));
  return std::sqrt(best);
}

// log2 of the n-ball volume pi^{n/2} r^n / Gamma(n/2 + 1); stays finite far
// beyond the range where the linear value would overflow.
inline double log2_sphere_volume(double n, double r) {
  if (!(n >= 1.0) || !(r > 0.0)) throw std::domain_error("log2_sphere_volume: need n>=1, r>0");
  constexpr double ln2 = 0.69314718055994530942;
  return (n / 2.0 * std::log(M_PI) + n * std::log(r) - std::lgamma(n / 2.0 + 1.0)) / ln2;
}

inline double sphere_volume(int n, double r) {
  return std::exp2(log2_sphere_volume(static_cast<double>(n), r));
}

// log2 of 2^{-n} A^n / Vol(S(n, r0)): the guaranteed codeword count of a
// saturated packing.
inline double count_lower_bound_log2(int n, double A, double r0) {
  if (!(r0 > 0.0)) throw std::domain_error("count_lower_bound_log2: r0 must be positive");
  return -static_cast<double>(n) + n * std::log2(A) -
         log2_sphere_volume(static_cast<double>(n), r0);
}

namespace detail {

inline void sample_center(Rng& rng, const PackingConfig& cfg, ReleaseVector& out) {
  out.resize(static_cast<std::size_t>(cfg.n));
  for (auto& v : out) {
    v = cfg.A * rng.uniform01();
    if (v < cfg.c_min) v = cfg.c_min;
  }
}

inline bool far_from_all(const std::vector<ReleaseVector>& centers, const ReleaseVector& x,
                         double min_sq) {
  for (const auto& c : centers)
    if (squared_distance(c, x) < min_sq) return false;
  return true;
}

}  // namespace detail

// Random sequential insertion: uniform candidates, accepted iff at distance
// >= 2 r0 from every accepted center, stopping after stop_K consecutive
// rejections. The candidate stream is a pure function of the seed, so a
// larger stop_K can only extend the accepted prefix.
inline Codebook construct_saturated(const PackingConfig& cfg) {
  cfg.validate();
  Codebook cb;
  cb.n = cfg.n;
  cb.A = cfg.A;
  cb.a = cfg.a;
  cb.b = cfg.b;
  cb.r0 = cfg.r0();
  cb.c_min = cfg.c_min;
  cb.seed = cfg.seed;
  cb.stop_K = cfg.effective_stop_K();
  cb.method = "rsa";

  Rng rng = Rng::substream(cfg.seed, 0);
  const double sep_sq = 4.0 * cb.r0 * cb.r0;
  long long consecutive = 0;
  ReleaseVector cand;
  while (consecutive < cb.stop_K) {
    if (cb.size() >= cfg.max_M) {
      cb.capped = true;
      break;
    }
    detail::sample_center(rng, cfg, cand);
    ++cb.candidates;
    if (detail::far_from_all(cb.codewords, cand, sep_sq)) {
      cb.codewords.push_back(cand);
      consecutive = 0;
    } else {
      ++cb.rejected;
      ++consecutive;
    }
  }
  if (min_pairwise_distance(cb) < 2.0 * cb.r0 * (1.0 - 1e-12))
    throw std::logic_error("construct_saturated: pairwise distance invariant violated");
  return cb;
}

struct SaturationCertificate {
  std::uint64_t trials = 0;
  std::uint64_t covered = 0;
  std::vector<ReleaseVector> witnesses;  // uncovered points, capped

  double coverage() const {
    return trials == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(trials);
  }
  bool saturated() const { return covered == trials; }
};

// Samples uniform cube points and reports any at distance > 2 r0 from every
// center. An empty witness list over many trials is the saturation
// certificate; a witness is directly insertable.
inline SaturationCertificate saturation_check(const Codebook& cb, std::uint64_t trials,
                                              std::uint64_t seed, std::size_t max_witnesses = 32) {
  if (trials < 1) throw std::invalid_argument("saturation_check: trials must be >= 1");
  SaturationCertificate cert;
  cert.trials = trials;
  const double cover_sq = 4.0 * cb.r0 * cb.r0;
  ReleaseVector x(static_cast<std::size_t>(cb.n));
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, t);
    for (auto& v : x) v = cb.A * rng.uniform01();
    if (detail::far_from_all(cb.codewords, x, cover_sq) && !cb.codewords.empty()) {
      if (cert.witnesses.size() < max_witnesses) cert.witnesses.push_back(x);
    } else {
      ++cert.covered;
    }
  }
  if (cb.codewords.empty()) cert.covered = 0;
  return cert;
}

// Repair loop: scan passes of `trials` uniform points, inserting every point
// still uncovered at radius 2 r0 (after the coordinate clamp) until a full
// pass finds none. Returns the number of inserted centers.
inline std::uint64_t repair_to_saturation(Codebook& cb, std::uint64_t trials, std::uint64_t seed,
                                          int max_passes = 1000) {
  const double cover_sq = 4.0 * cb.r0 * cb.r0;
  std::uint64_t added = 0;
  ReleaseVector x;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool inserted = false;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng = Rng::substream(mix_key(seed, static_cast<std::uint64_t>(pass) + 1), t);
      x.resize(static_cast<std::size_t>(cb.n));
      for (auto& v : x) v = cb.A * rng.uniform01();
      if (!detail::far_from_all(cb.codewords, x, cover_sq)) continue;
      for (auto& v : x)
        if (v < cb.c_min) v = cb.c_min;
      if (detail::far_from_all(cb.codewords, x, cover_sq)) {
        cb.codewords.push_back(x);
        ++added;
        inserted = true;
      }
    }
    if (!inserted) break;
  }
  if (added > 0) {
    cb.repaired += added;
    cb.method = cb.method == "rsa" ? "rsa+repair" : cb.method;
  }
  return added;
}

// Alternates certification passes with insertion of the witnesses they find
// until one full pass comes back clean; the returned certificate is that
// clean pass (or the last one, if the coordinate clamp blocks every insert).
inline SaturationCertificate certify_saturated(Codebook& cb, std::uint64_t trials,
                                               std::uint64_t seed, int max_rounds = 100) {
  SaturationCertificate cert;
  const double cover_sq = 4.0 * cb.r0 * cb.r0;
  for (int round = 0; round < max_rounds; ++round) {
    cert = saturation_check(cb, trials, mix_key(seed, static_cast<std::uint64_t>(round)));
    if (cert.saturated()) return cert;
    std::uint64_t added = 0;
    for (auto w : cert.witnesses) {
      for (auto& v : w)
        if (v < cb.c_min) v = cb.c_min;
      if (detail::far_from_all(cb.codewords, w, cover_sq)) {
        cb.codewords.push_back(w);
        ++added;
      }
    }
    if (added == 0) break;
    cb.repaired += added;
    cb.method = cb.method == "rsa" ? "rsa+repair" : cb.method;
  }
  return cert;
}

struct DensityEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
};

// Monte Carlo estimate of Vol(union of r0-balls, intersected with the cube)
// divided by A^n: the fraction of uniform cube points within r0 of a center.
inline DensityEstimate density_estimate(const Codebook& cb, std::uint64_t trials,
                                        std::uint64_t seed, int threads = 1) {
  if (trials < 1) throw std::invalid_argument("density_estimate: trials must be >= 1");
  DensityEstimate de;
  de.trials = trials;
  const double r_sq = cb.r0 * cb.r0;
  de.hits = detail::sum_chunked(trials, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t count = 0;
    ReleaseVector x(static_cast<std::size_t>(cb.n));
    for (std::uint64_t t = lo; t < hi; ++t) {
      Rng rng = Rng::substream(seed, t);
      for (auto& v : x) v = cb.A * rng.uniform01();
      for (const auto& c : cb.codewords) {
        if (squared_distance(c, x) <= r_sq) {
          ++count;
          break;
        }
      }
    }
    return count;
  });
  de.estimate = static_cast<double>(de.hits) / static_cast<double>(trials);
  de.std_err = std::sqrt(de.estimate * (1.0 - de.estimate) / static_cast<double>(trials));
  return de;
}

}  // namespace dicode
