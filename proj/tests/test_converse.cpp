#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "dicode/converse.hpp"

using namespace dicode;

namespace {

// integer-level instance: c values on the grid k/T_s so T_s c is an integer
struct GridInstance {
  int n = 0;
  double T_s = 0.0;
  ReleaseVector c1, c2;
  ObservationVector y;
  std::vector<int> N1, N2;
};

GridInstance random_instance(int n, int kase, double p, Rng& rng) {
  GridInstance g;
  g.n = n;
  const int Ts = static_cast<int>(std::ceil(std::pow(n, 1.25)));
  g.T_s = Ts;
  g.c1.resize(n);
  g.c2.resize(n);
  g.y.resize(n);
  g.N1.resize(n);
  g.N2.resize(n);
  for (int t = 0; t < n; ++t) {
    const int k1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(Ts - 1)));
    int step;
    if (kase == 1)
      step = 1;
    else if (kase == 2)
      step = -1;
    else
      step = t == 0 ? 1 : (t == 1 ? -1 : (rng.uniform01() < 0.5 ? 1 : -1));
    const int k2 = k1 + step;
    g.N1[t] = k1;
    g.N2[t] = k2;
    g.c1[t] = static_cast<double>(k1) / Ts;
    g.c2[t] = static_cast<double>(k2) / Ts;
    BinomialSampler s(std::min(k1, k2), p);
    g.y[t] = s.draw(rng);
  }
  return g;
}

}  // namespace

TEST_CASE("minimum distance check") {
  Codebook cb;
  cb.n = 3;
  cb.A = 1.0;
  cb.codewords = {{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}};

  SUBCASE("duplicates are flagged") {
    const auto rep = min_distance_check(cb, 0.01);
    REQUIRE(rep.offending.size() == 1);
    CHECK(rep.offending[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK_FALSE(rep.ok());
  }
  SUBCASE("uniform sub-threshold gap is flagged") {
    Codebook close;
    close.n = 3;
    close.A = 1.0;
    const double eps = 0.01;
    close.codewords = {{0.5, 0.5, 0.5}, {0.5 + eps / 2, 0.5 + eps / 2, 0.5 + eps / 2}};
    CHECK_FALSE(min_distance_check(close, eps).ok());
    // gap above the threshold in one coordinate clears the pair
    close.codewords[1][0] = 0.5 + 2 * eps;
    CHECK(min_distance_check(close, eps).ok());
  }
  SUBCASE("l2 separation implies the per-coordinate property when wide enough") {
    PackingConfig pc;
    pc.n = 4;
    pc.a = 0.09;
    pc.b = 0.25;
    pc.A = 1.0;
    pc.stop_K = 2000;
    pc.seed = 9;
    const Codebook built = construct_saturated(pc);
    // pairwise l2 >= 2 r0 forces linf >= 2 r0 / sqrt(n)
    const double guaranteed = 2.0 * built.r0 / std::sqrt(4.0);
    const auto rep = min_distance_check(built, guaranteed * 0.99);
    CHECK(rep.ok());
  }
  SUBCASE("needs two codewords") {
    Codebook single;
    single.n = 2;
    single.codewords = {{0.1, 0.2}};
    CHECK_THROWS_AS(min_distance_check(single, 0.1), std::invalid_argument);
  }
}

TEST_CASE("gamma ratio double inequality") {
  SUBCASE("hand-evaluated points") {
    const auto g23 = gamma_ratio_bounds(2.0, 3.0);
    CHECK(g23.exact == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g23.lower == 2.0);
    CHECK(g23.upper == 2.0);

    const auto g12 = gamma_ratio_bounds(1.0, 2.0);
    CHECK(g12.exact == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g12.lower == 1.0);
    CHECK(g12.upper == 1.0);
  }
  SUBCASE("random sweep") {
    for (std::uint64_t t = 0; t < 20000; ++t) {
      Rng rng = Rng::substream(505, t);
      const double a = 100.0 * rng.uniform01();
      const double b = a + (100.0 - a) * rng.uniform01();
      if (!(a > 0.0) || !(b > a)) continue;
      const auto g = gamma_ratio_bounds(a, b);
      const double log_exact = std::log(g.exact);
      const double tol = 1e-10 * std::max(1.0, std::fabs(log_exact));
      if (g.lower > 0.0) CHECK(std::log(g.lower) <= log_exact + tol);
      CHECK(log_exact <= std::log(g.upper) + tol);
    }
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(gamma_ratio_bounds(2.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(gamma_ratio_bounds(0.0, 1.0), std::domain_error);
  }
}

TEST_CASE("likelihood ratio product") {
  ChannelParams params(0.3, 8.0, 1.0, 1.0);

  SUBCASE("identical codewords give exactly one") {
    const ReleaseVector c{0.25, 0.5, 0.75};
    const ObservationVector y{1, 2, 3};
    const auto lr = likelihood_ratio_product_bounds(c, c, y, params, 1e-6);
    CHECK(lr.log_exact == 0.0);
    CHECK(lr.exact() == 1.0);
    CHECK(lr.log_lower <= 0.0);
    CHECK(lr.log_upper >= 0.0);
  }
  SUBCASE("matches the direct pmf ratio on integer levels") {
    Rng rng(808);
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 4 + static_cast<int>(rng.below(9));
      const int kase = 1 + static_cast<int>(rng.below(3));
      const auto g = random_instance(n, kase, 0.3, rng);
      ChannelParams ps(0.3, g.T_s, 1.0, 1.0);
      const double eps_prime = 1.0 / std::pow(n, 1.25);
      const auto lr = likelihood_ratio_product_bounds(g.c1, g.c2, g.y, ps, eps_prime);
      double direct = 0.0;
      for (int t = 0; t < n; ++t)
        direct += log_pmf(g.N2[t], 0.3, g.y[t]) - log_pmf(g.N1[t], 0.3, g.y[t]);
      CHECK(lr.log_exact == doctest::Approx(direct).epsilon(1e-9));
      CHECK(lr.log_lower <= lr.log_exact + 1e-10 * std::max(1.0, std::fabs(lr.log_exact)));
      CHECK(lr.log_exact <= lr.log_upper + 1e-10 * std::max(1.0, std::fabs(lr.log_exact)));
    }
  }
  SUBCASE("support and hypothesis violations") {
    const ReleaseVector c1{0.5, 0.5};
    const ReleaseVector c2{0.5 + 1.0 / 8.0, 0.5};
    const ObservationVector ok_y{1, 1};
    CHECK_THROWS_AS(likelihood_ratio_product_bounds(c1, c2, ok_y, params, 1e-3),
                    std::invalid_argument);  // gap 0.125 > eps
    const ObservationVector big_y{40, 0};
    CHECK_THROWS_AS(likelihood_ratio_product_bounds(c1, c2, big_y, params, 0.2),
                    std::domain_error);
  }
}

TEST_CASE("kappa report and the linearization step") {
  ChannelParams params(0.3, 10.0, 1.0, 1.0);
  const auto desk = converse_kappa(params, 64, 0.25);
  CHECK(desk.kappa == doctest::Approx(200.0 / std::pow(64.0, 0.25)).epsilon(1e-12));
  CHECK_FALSE(desk.bernoulli_valid);  // exponent 10/64^{0.25} > 1

  // far into the asymptotic regime the linearization applies and holds
  const auto deep = converse_kappa(params, 1 << 30, 0.25);
  CHECK(deep.bernoulli_valid);
  const double base = 1.0 + 2.0 * params.amplitude() * params.T_s;
  CHECK(std::pow(base, deep.bernoulli_exponent) <= 1.0 + deep.kappa);

  // the inequality it relies on, at those exact parameter values
  CHECK(bernoulli_inequality_holds(2.0 * params.amplitude() * params.T_s,
                                   deep.bernoulli_exponent));
  CHECK_FALSE(bernoulli_inequality_holds(2.0, 3.0));  // flips outside 0 <= r <= 1
}

TEST_CASE("contradiction demo") {
  ChannelParams params(0.3, 10.0, 1.0, 1.0);
  const int n = 64;
  const ConverseConfig conv = ConverseConfig::derive(1.0, n, 0.25);
  const DecoderConfig dec = DecoderConfig::derive(1.0, n, 0.25);

  SUBCASE("identical codewords sum to exactly one") {
    const ReleaseVector c(n, 0.5);
    const auto rep = converse_contradiction_demo(c, c, params, conv, dec, 2000, 99);
    CHECK(rep.sum() == 1.0);
    CHECK(rep.ok);
  }
  SUBCASE("half-eps gap keeps the sum near one") {
    ReleaseVector c1(n, 0.5), c2(n, 0.5 + conv.eps_prime / 2.0);
    const auto rep = converse_contradiction_demo(c1, c2, params, conv, dec, 4000, 17);
    CHECK(rep.sum() >= 1.0 - rep.kappa - 3.0 * rep.sum_se());
    CHECK(rep.sum() >= 0.9);  // the substance: the decoder cannot tell them apart
  }
  SUBCASE("well separated pairs are rejected") {
    ReleaseVector c1(n, 0.1), c2(n, 0.9);
    CHECK_THROWS_AS(converse_contradiction_demo(c1, c2, params, conv, dec, 2000, 1),
                    std::invalid_argument);
  }
  SUBCASE("parallel equals serial") {
    ReleaseVector c1(n, 0.5), c2(n, 0.5 + conv.eps_prime / 4.0);
    const auto serial = converse_contradiction_demo(c1, c2, params, conv, dec, 2000, 5, 1);
    const auto par = converse_contradiction_demo(c1, c2, params, conv, dec, 2000, 5, 4);
    CHECK(serial.type1 == par.type1);
    CHECK(serial.type2 == par.type2);
  }
}

TEST_CASE("constructed codebooks respect the converse count ceiling") {
  PackingConfig pc;
  pc.n = 5;
  pc.a = 0.04;
  pc.b = 0.25;
  pc.A = 1.0;
  pc.stop_K = 3000;
  pc.seed = 31;
  const Codebook cb = construct_saturated(pc);
  const double P_max = 1.0;
  const double eps_prime = P_max / std::pow(static_cast<double>(cb.n), 1.0 + cb.b);
  const double ceiling = -0.599 * cb.n + cb.n * std::log2(P_max) -
                         log2_sphere_volume(static_cast<double>(cb.n), eps_prime);
  CHECK(std::log2(static_cast<double>(cb.size())) <= ceiling);
}
