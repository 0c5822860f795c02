#include <cmath>

#include "doctest.h"

#include "dicode/bounds.hpp"

using namespace dicode;

TEST_CASE("rate lower bound") {
  SUBCASE("domain") {
    CHECK_THROWS_AS(rate_lower(3.0, 1.0, 1.0, 1e-3), std::domain_error);
    CHECK_THROWS_AS(rate_lower(100.0, 1.0, 1.0, 1.5), std::domain_error);
  }
  SUBCASE("independent recomputation") {
    const double n = 1e6, b = 1e-3, A = 1.0, a = 1.0;
    const double L = std::log2(n);
    const double expected =
        ((1 - b) / 4 + (std::log2(A / (M_E * std::sqrt(a))) - 2 - 0.5 * std::log2(M_E)) / L -
         1.0 / n);
    CHECK(rate_lower(n, A, a, b) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("b near one kills the leading coefficient") {
    const double hi_b = rate_lower(1e6, 1.0, 1.0, 0.999);
    const double lo_b = rate_lower(1e6, 1.0, 1.0, 1e-3);
    CHECK(hi_b < lo_b - 0.2);
  }
  SUBCASE("increasing A increases the bound") {
    CHECK(rate_lower(1e4, 2.0, 1.0, 0.1) > rate_lower(1e4, 1.0, 1.0, 0.1));
  }
}

TEST_CASE("rate upper bound") {
  SUBCASE("coefficient of n log n is exactly 3/2 + b") {
    for (double b : {1e-3, 0.1, 0.4}) {
      const double n = 4096.0;
      // subtract the constant-term contribution: evaluate at two n and compare
      const double v1 = log2_M_upper_chain(n, 1.0, b) / n + (std::log2(std::sqrt(M_PI * M_E)) + 1.099);
      CHECK(v1 == doctest::Approx((1.5 + b) * std::log2(n)).epsilon(1e-12));
    }
  }
  SUBCASE("larger P_max lowers the constant-term contribution") {
    const double n = 1e5, b = 1e-3;
    CHECK(rate_upper(n, 2.0, b) < rate_upper(n, 1.0, b));
  }
  SUBCASE("domain") { CHECK_THROWS_AS(rate_upper(1.0, 1.0, 1e-3), std::domain_error); }
}

TEST_CASE("both rates approach their limits monotonically") {
  double prev_dl = 1e9, prev_du = 1e9;
  for (int k = 3; k <= 8; ++k) {
    const double n = std::pow(10.0, k);
    const double dl = std::fabs(rate_lower(n, 1.0, 1.0, 1e-3) - 0.25);
    const double du = std::fabs(rate_upper(n, 1.0, 1e-3) - 1.5);
    CHECK(dl < prev_dl);
    CHECK(du < prev_du);
    prev_dl = dl;
    prev_du = du;
  }
  // and lower stays below upper across the grid
  for (int k = 3; k <= 9; ++k) {
    const double n = std::pow(10.0, k);
    CHECK(rate_lower(n, 1.0, 1.0, 1e-3) < rate_upper(n, 1.0, 1e-3));
  }
}

TEST_CASE("evaluations stay finite far out") {
  const double n = 1e9;
  CHECK(std::isfinite(rate_lower(n, 1.0, 1.0, 1e-3)));
  CHECK(std::isfinite(rate_upper(n, 1.0, 1e-3)));
  CHECK(std::isfinite(bound_report(n, 1.0, 1.0, 1e-3, 1.0).log2_M_lower));
}

TEST_CASE("bound report terms") {
  const BoundReport r = bound_report(1e6, 1.0, 1.0, 1e-3, 1.0);
  CHECK(r.rate_lower == rate_lower(1e6, 1.0, 1.0, 1e-3));
  CHECK(r.rate_upper == rate_upper(1e6, 1.0, 1e-3));
  double lower_sum = 0.0;
  bool has_exact = false, has_gap = false;
  for (const auto& [name, value] : r.terms) {
    if (name.rfind("lower.", 0) == 0 && name.find("exact") == std::string::npos &&
        name.find("chain_minus") == std::string::npos)
      lower_sum += value;
    if (name == "lower.log2_M_exact_count") has_exact = true;
    if (name == "lower.chain_minus_exact") has_gap = true;
  }
  CHECK(lower_sum == doctest::Approx(r.log2_M_lower).epsilon(1e-12));
  CHECK(has_exact);
  CHECK(has_gap);
  // at P_max = 1 the printed chain and the exact substitution agree up to o(n) terms
  for (const auto& [name, value] : r.terms)
    if (name == "upper.chain_minus_exact") CHECK(std::fabs(value) / 1e6 < 0.7);
}

TEST_CASE("scaling diagnostic") {
  SUBCASE("synthetic super-exponential family recovers its slope") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {64.0, 128.0, 256.0, 512.0})
      pts.emplace_back(n, 0.25 * n * std::log2(n));
    const auto d = scaling_diagnostic(pts, 0.25);
    CHECK(d.slope == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(d.in_range);
  }
  SUBCASE("constant codebook size has slope zero") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {64.0, 128.0, 256.0}) pts.emplace_back(n, std::log2(100.0));
    const auto d = scaling_diagnostic(pts, 0.25);
    CHECK(d.slope == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("constructed codebooks give a positive slope") {
    std::vector<std::pair<double, double>> pts;
    for (int n : {6, 8, 10, 12}) {
      PackingConfig pc;
      pc.n = n;
      pc.a = 0.09;  // fixed radius scale across the sweep
      pc.b = 0.25;
      pc.A = 1.0;
      pc.stop_K = 1500;
      pc.seed = 1000 + static_cast<std::uint64_t>(n);
      const Codebook cb = construct_saturated(pc);
      pts.emplace_back(static_cast<double>(n), std::log2(static_cast<double>(cb.size())));
    }
    const auto d = scaling_diagnostic(pts, 0.25);
    CHECK(d.slope > 0.0);
    CHECK(d.points == 4);
  }
  SUBCASE("needs three points") {
    CHECK_THROWS_AS(scaling_diagnostic({{64.0, 1.0}, {128.0, 2.0}}, 0.25),
                    std::invalid_argument);
  }
}
