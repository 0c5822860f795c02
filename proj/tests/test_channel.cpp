#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"

#include "dicode/channel.hpp"

using namespace dicode;

TEST_CASE("capture probability formula and limits") {
  // frozen against 50-digit evaluation of the diffusion formula
  CHECK(capture_probability(1e-18, 1e-9, 1e-6, 1e-3) ==
        doctest::Approx(0.017482823917577467).epsilon(1e-12));

  // d -> 0 approaches V_rx/(4 pi D tau)^{3/2}
  const double lim = 1e-18 / std::pow(4.0 * M_PI * 1e-9 * 1e-3, 1.5);
  CHECK(capture_probability(1e-18, 1e-9, 1e-12, 1e-3) == doctest::Approx(lim).epsilon(1e-9));

  // boundary case evaluates to exactly 1 and is rejected
  CHECK_THROWS_AS(capture_probability(1.0, 1.0 / (4.0 * M_PI), 0.0, 1.0), InvalidGeometryError);

  CHECK_THROWS_AS(capture_probability(0.0, 1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(capture_probability(1.0, -1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(capture_probability(1.0, 1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(capture_probability(1.0, 1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("channel params invariants") {
  ChannelParams params(0.3, 10.0, 2.0, 0.7);
  CHECK(params.amplitude() == 0.7);
  CHECK(params.molecule_count(0.55) == 5);
  CHECK_THROWS_AS(ChannelParams(1.0, 1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(ChannelParams(0.5, 0.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("log pmf exact values") {
  CHECK(log_pmf(0, 0.3, 0) == 0.0);
  CHECK(log_pmf(10, 0.5, 5) == doctest::Approx(std::log(252.0 / 1024.0)).epsilon(1e-13));
  CHECK(log_pmf(5, 0.2, 7) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_pmf(5, 0.0, 2), std::domain_error);
  CHECK_THROWS_AS(log_pmf(5, 1.0, 2), std::domain_error);

  for (int y = 0; y <= 10; ++y)
    CHECK(std::exp(log_pmf(10, 0.37, y)) ==
          doctest::Approx(testutil::pmf_oracle(10, 0.37, y)).epsilon(1e-12));
}

TEST_CASE("pmf normalization over the full grid") {
  for (int N = 0; N <= 60; ++N) {
    for (double p = 0.1; p < 0.95; p += 0.1) {
      double sum = 0.0;
      for (int y = 0; y <= N; ++y) sum += std::exp(log_pmf(N, p, y));
      REQUIRE(std::fabs(sum - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("n-use log likelihood") {
  ChannelParams params(0.4, 3.0, 2.0, 2.0);

  SUBCASE("single use reduces to log_pmf") {
    const ReleaseVector x{1.2};
    const ObservationVector y{2};
    CHECK(n_use_log_likelihood(x, y, params) == log_pmf(3, 0.4, 2));
  }
  SUBCASE("all-zero codeword is a certain outcome") {
    CHECK(n_use_log_likelihood({0.0, 0.0, 0.0}, {0, 0, 0}, params) == 0.0);
  }
  SUBCASE("matches a brute-force per-symbol table at n=3") {
    const ReleaseVector x{1.1, 2.0, 3.9};  // counts 3, 6, 11
    const ObservationVector y{1, 0, 7};
    const double expected = std::log(testutil::pmf_oracle(3, 0.4, 1)) +
                            std::log(testutil::pmf_oracle(6, 0.4, 0)) +
                            std::log(testutil::pmf_oracle(11, 0.4, 7));
    CHECK(n_use_log_likelihood(x, y, params) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("memoryless: bitwise equal to the per-symbol sum") {
    const ReleaseVector x{0.7, 1.5, 0.1, 3.2};
    const ObservationVector y{1, 3, 0, 5};
    double manual = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
      manual += log_pmf(params.molecule_count(x[t]), params.p, y[t]);
    CHECK(n_use_log_likelihood(x, y, params) == manual);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(n_use_log_likelihood({1.0}, {0, 0}, params), std::invalid_argument);
  }
}

TEST_CASE("sampler determinism and degenerate cases") {
  ChannelParams params(0.999, 1.0, 5.0, 5.0);
  Rng rng(7);
  const ObservationVector zeros = sample({0.0, 0.4, 0.9}, ChannelParams(0.5, 1.0, 5.0, 5.0), rng);
  CHECK(zeros == ObservationVector{0, 0, 0});  // all counts floor to zero

  // floor(T_s x) = 1 with p near one: nearly always a single arrival
  BinomialSampler near_one(1, 0.999);
  int ones = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    Rng r = Rng::substream(11, t);
    ones += near_one.draw(r);
  }
  CHECK(ones > 1970);

  Rng r1(5), r2(5);
  const ReleaseVector x{1.0, 2.5, 4.0};
  CHECK(sample(x, params, r1) == sample(x, params, r2));
}

TEST_CASE("sampler matches the pmf: moments and chi-square") {
  const int N = 20;
  const double p = 0.3;
  const std::uint64_t samples = 1000000;
  BinomialSampler sampler(N, p);
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t t = 0; t < samples; ++t) {
    Rng rng = Rng::substream(2718, t);
    const double v = sampler.draw(rng);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = sumsq / static_cast<double>(samples) - mean * mean;
  const double se_mean = std::sqrt(N * p * (1 - p) / static_cast<double>(samples));
  CHECK(std::fabs(mean - N * p) <= 4.0 * se_mean);
  CHECK(std::fabs(var - N * p * (1 - p)) <= 0.05 * N * p * (1 - p));

  const auto gof = testutil::sampler_gof(N, p, samples, 31415);
  CHECK(gof.p_value >= 1e-3);
}

TEST_CASE("moment bound holds on the validated grid") {
  const std::vector<double> ps = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto violations = scan_moment_bound(60, ps);
  CHECK(violations.empty());
}

TEST_CASE("closed-form raw moments match full-support summation") {
  for (int N : {1, 7, 23, 60}) {
    for (double p : {0.1, 0.5, 0.9}) {
      for (int k = 1; k <= 4; ++k) {
        CHECK(binomial_raw_moment(N, p, k) ==
              doctest::Approx(testutil::moment_oracle(N, p, k)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("power constraint validator") {
  ChannelParams params(0.3, 10.0, 1.0, 0.5);
  CHECK(satisfies_power_constraints({0.4, 0.5, 0.1}, params));
  CHECK_FALSE(satisfies_power_constraints({1.2, 0.0}, params));   // peak
  CHECK_FALSE(satisfies_power_constraints({0.9, 0.9}, params));   // average
  CHECK_FALSE(satisfies_power_constraints({-0.1, 0.2}, params));  // sign
}
