#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dicode/packing.hpp"

namespace dicode {

// All logarithms base 2; every o(.) residual is dropped and itemized in the
// term breakdown so the distance to the asymptotic limit stays auditable.

inline double log2_M_lower_chain(double n, double A, double a, double b) {
  const double L = std::log2(n);
  return (1.0 - b) / 4.0 * n * L + n * std::log2(A / (M_E * std::sqrt(a))) - 2.0 * n - L -
         n / 2.0 * std::log2(M_E);
}

// achievable-rate lower bound at blocklength n, normalized by n log2 n
inline double rate_lower(double n, double A, double a, double b) {
  if (!(n >= 4.0)) throw std::domain_error("rate_lower: n must be >= 4");
  if (!(A > 0.0) || !(a > 0.0) || !(b > 0.0 && b < 1.0))
    throw std::domain_error("rate_lower: bad parameters");
  return log2_M_lower_chain(n, A, a, b) / (n * std::log2(n));
}

inline double log2_M_upper_chain(double n, double P_max, double b) {
  const double L = std::log2(n);
  return (0.5 + 1.0 + b) * n * L - n * (std::log2(P_max * std::sqrt(M_PI * M_E)) + 1.099);
}

// converse upper bound on the rate at blocklength n, with r0 = P_max/n^{1+b}
inline double rate_upper(double n, double P_max, double b) {
  if (!(n >= 2.0)) throw std::domain_error("rate_upper: n must be >= 2");
  if (!(P_max > 0.0) || !(b > 0.0 && b < 1.0)) throw std::domain_error("rate_upper: bad parameters");
  return log2_M_upper_chain(n, P_max, b) / (n * std::log2(n));
}

struct BoundReport {
  double n = 0.0;
  double b = 0.0, A = 0.0, a = 0.0, P_max = 0.0;
  double log2_M_lower = 0.0, log2_M_upper = 0.0;
  double rate_lower = 0.0, rate_upper = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};

inline BoundReport bound_report(double n, double A, double a, double b, double P_max) {
  BoundReport r;
  r.n = n;
  r.b = b;
  r.A = A;
  r.a = a;
  r.P_max = P_max;
  const double L = std::log2(n);
  r.log2_M_lower = log2_M_lower_chain(n, A, a, b);
  r.log2_M_upper = log2_M_upper_chain(n, P_max, b);
  r.rate_lower = r.log2_M_lower / (n * L);
  r.rate_upper = r.log2_M_upper / (n * L);

  const double r0_lower = std::sqrt(a) * std::pow(n, (1.0 + b) / 4.0);
  const double r0_upper = P_max / std::pow(n, 1.0 + b);
  // exact counting chains, no Stirling step
  const double exact_lower = -n + n * std::log2(A) - log2_sphere_volume(n, r0_lower);
  const double exact_upper =
      -0.599 * n + n * std::log2(P_max) - log2_sphere_volume(n, r0_upper);

  r.terms = {
      {"lower.n_log_n", (1.0 - b) / 4.0 * n * L},
      {"lower.n_log_A_over_e_sqrt_a", n * std::log2(A / (M_E * std::sqrt(a)))},
      {"lower.minus_2n", -2.0 * n},
      {"lower.minus_log_n", -L},
      {"lower.minus_half_n_log_e", -n / 2.0 * std::log2(M_E)},
      {"lower.o_terms_dropped", 0.0},
      {"lower.log2_M_exact_count", exact_lower},
      {"lower.chain_minus_exact", r.log2_M_lower - exact_lower},
      {"upper.n_log_n", (1.5 + b) * n * L},
      {"upper.minus_n_const", -n * (std::log2(P_max * std::sqrt(M_PI * M_E)) + 1.099)},
      {"upper.o_terms_dropped", 0.0},
      {"upper.log2_M_exact_count", exact_upper},
      {"upper.chain_minus_exact", r.log2_M_upper - exact_upper},
  };
  return r;
}

struct ScalingDiagnostic {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_err = 0.0;
  std::size_t points = 0;
  double lo = 0.0, hi = 0.0;  // reference interval for the slope
  bool in_range = false;
};

// Least-squares fit of log2 M against n log2 n across codebooks at several
// blocklengths. Diagnostic only; desk-scale n sits far from the asymptotic
// regime, so the slope is reported with its standard error, not asserted.
inline ScalingDiagnostic scaling_diagnostic(const std::vector<std::pair<double, double>>& n_log2M,
                                            double b, double slack = 0.1) {
  if (n_log2M.size() < 3)
    throw std::invalid_argument("scaling_diagnostic: need at least three points");
  ScalingDiagnostic d;
  d.points = n_log2M.size();
  const double m = static_cast<double>(n_log2M.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, y] : n_log2M) {
    sx += n * std::log2(n);
    sy += y;
  }
  const double xbar = sx / m, ybar = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, y] : n_log2M) {
    const double dx = n * std::log2(n) - xbar;
    sxx += dx * dx;
    sxy += dx * (y - ybar);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("scaling_diagnostic: blocklengths must differ");
  d.slope = sxy / sxx;
  d.intercept = ybar - d.slope * xbar;
  double rss = 0.0;
  for (const auto& [n, y] : n_log2M) {
    const double res = y - (d.intercept + d.slope * n * std::log2(n));
    rss += res * res;
  }
  d.slope_std_err = m > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  d.lo = (1.0 - b) / 4.0 - slack;
  d.hi = 1.5 + b;
  d.in_range = d.slope >= d.lo && d.slope <= d.hi;
  return d;
}

}  // namespace dicode
