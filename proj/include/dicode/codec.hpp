#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "dicode/channel.hpp"
#include "dicode/packing.hpp"

namespace dicode {

// ExactFloor keeps the integer molecule counts the channel actually uses, so
// the decoding metric is exactly zero-mean under the true codeword.
// NoFloor replaces floor(T_s c) by T_s c in the metric mean.
enum class MetricMode { ExactFloor, NoFloor };

inline std::string to_string(MetricMode m) {
  return m == MetricMode::ExactFloor ? "exact-floor" : "no-floor";
}

inline MetricMode metric_mode_from_string(const std::string& s) {
  if (s == "exact-floor") return MetricMode::ExactFloor;
  if (s == "no-floor") return MetricMode::NoFloor;
  throw std::invalid_argument("unknown metric mode: " + s);
}

inline double derive_delta_n(double A, int n, double b) {
  if (n < 1 || !(A > 0.0) || !(b > 0.0 && b < 1.0))
    throw std::invalid_argument("derive_delta_n: bad arguments");
  return A / std::pow(static_cast<double>(n), (1.0 - b) / 2.0);
}

struct DecoderConfig {
  double delta_n = 0.0;
  MetricMode mode = MetricMode::ExactFloor;
  double b = 0.25;

  static DecoderConfig derive(double A, int n, double b, MetricMode mode = MetricMode::ExactFloor) {
    DecoderConfig cfg;
    cfg.delta_n = derive_delta_n(A, n, b);
    cfg.mode = mode;
    cfg.b = b;
    return cfg;
  }
};

struct IdentificationOutcome {
  std::size_t target = 0;
  bool accepted = false;
  double metric_value = 0.0;
};

inline const ReleaseVector& encode(std::size_t i, const Codebook& cb) {
  if (i >= cb.size()) throw std::out_of_range("encode: message index out of range");
  return cb.codewords[i];
}

inline double metric_mean_term(double c, const ChannelParams& params, MetricMode mode) {
  return mode == MetricMode::ExactFloor
             ? params.p * static_cast<double>(params.molecule_count(c))
             : params.p * params.T_s * c;
}

// T(y, c) = (1/n) sum_t [(y_t - mu_t)^2 - (1-p) y_t]
inline double decoding_metric(const ObservationVector& y, const ReleaseVector& c,
                              const ChannelParams& params, MetricMode mode) {
  if (y.size() != c.size()) throw std::invalid_argument("decoding_metric: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double mu = metric_mean_term(c[t], params, mode);
    const double dev = static_cast<double>(y[t]) - mu;
    sum += dev * dev - (1.0 - params.p) * static_cast<double>(y[t]);
  }
  return sum / static_cast<double>(y.size());
}

// Was message j sent? Depends only on (y, c_j, delta_n): a per-target
// hypothesis test, not a classifier.
inline IdentificationOutcome identify(const ObservationVector& y, std::size_t j,
                                      const Codebook& cb, const DecoderConfig& cfg,
                                      const ChannelParams& params) {
  if (j >= cb.size()) throw std::out_of_range("identify: target index out of range");
  IdentificationOutcome out;
  out.target = j;
  out.metric_value = decoding_metric(y, cb.codewords[j], params, cfg.mode);
  out.accepted = std::fabs(out.metric_value) <= cfg.delta_n;
  return out;
}

// Bound on |T_nofloor - T_floor| from |T_s c - floor(T_s c)| < 1:
// per symbol the means differ by p*frac, and
// (y-mu_f)^2 - (y-mu_a)^2 = (mu_a-mu_f)(2y - mu_a - mu_f).
inline double metric_mode_gap_bound(const ObservationVector& y, const ReleaseVector& c,
                                    const ChannelParams& params) {
  if (y.size() != c.size()) throw std::invalid_argument("metric_mode_gap_bound: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t)
    sum += 2.0 * static_cast<double>(y[t]) + 2.0 * params.p * params.T_s * c[t];
  return params.p * sum / static_cast<double>(y.size());
}

}  // namespace dicode
