#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/errors.hpp"

using namespace aoi;

namespace {

struct Welford {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

void check_moments_mc(const DelayDistribution& d, std::size_t n, std::uint64_t seed, double z = 3.0) {
  CAPTURE(d.describe());
  RngStream rng(seed, 0);
  Welford w1, w2;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    w1.add(x);
    w2.add(x * x);
  }
  CHECK(std::abs(w1.mean - d.mean()) <= z * w1.se() + 1e-12);
  CHECK(std::abs(w2.mean - d.second_moment()) <= z * w2.se() + 1e-12);
}

ChannelParams uniform_channel(double alpha) {
  ChannelParams p;
  p.alpha = alpha;
  p.fwd = p.bwd = DelayDistribution::uniform(0.0, 1.0);
  return p;
}

} // namespace

TEST_CASE("draw_delay examples") {
  RngStream rng(3, 0);
  CHECK(draw_delay(DelayDistribution::deterministic(1.0), rng) == 1.0);

  const auto u = DelayDistribution::uniform(0.0, 1.0);
  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double x = draw_delay(u, rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / 1e6 - 0.5) <= 0.002);
}

TEST_CASE("lognormal(1,1.8) mean over 1e7 draws") {
  const auto d = DelayDistribution::lognormal(1.0, 1.8);
  CHECK(d.mean() == doctest::Approx(std::exp(2.62)).epsilon(1e-12));
  RngStream rng(11, 0);
  double sum = 0.0;
  for (int i = 0; i < 10000000; ++i) sum += d.sample(rng);
  // Standard error is about 0.8% of the mean here.
  CHECK(sum / 1e7 == doctest::Approx(std::exp(2.62)).epsilon(0.04));
}

TEST_CASE("analytic moments match Monte Carlo for every kind") {
  const std::size_t n = 1000000;
  check_moments_mc(DelayDistribution::uniform(0.5, 2.0), n, 1);
  check_moments_mc(DelayDistribution::exponential(0.7), n, 2);
  check_moments_mc(DelayDistribution::lognormal(0.0, 0.5), n, 3);
  check_moments_mc(DelayDistribution::lognormal(1.0, 1.0).truncated_at_quantile(0.999), n, 4);
  check_moments_mc(DelayDistribution::lognormal(1.0, 1.8).truncated(50.0, Truncation::clamp), n, 5);
  check_moments_mc(DelayDistribution::exponential(1.0).with_floor(0.25).truncated(2.0), n, 6);
  check_moments_mc(DelayDistribution::uniform(0.0, 4.0).truncated(3.0), n, 7);
  check_moments_mc(DelayDistribution::uniform(0.0, 4.0).truncated(3.0, Truncation::clamp), n, 8);
}

TEST_CASE("support invariants") {
  RngStream rng(9, 0);
  const auto d = DelayDistribution::lognormal(1.0, 1.8).with_floor(0.3).truncated(20.0);
  REQUIRE(d.support_upper().has_value());
  CHECK(*d.support_upper() == 20.0);
  for (int i = 0; i < 100000; ++i) {
    const double x = d.sample(rng);
    REQUIRE(x >= 0.3);
    REQUIRE(x <= 20.0);
  }
  CHECK_FALSE(DelayDistribution::lognormal(1.0, 1.0).support_upper().has_value());
  CHECK(DelayDistribution::uniform(0.0, 2.0).support_upper().value() == 2.0);
}

TEST_CASE("draw counts are fixed per kind") {
  const std::vector<DelayDistribution> laws = {
      DelayDistribution::deterministic(1.0), DelayDistribution::uniform(0, 1), DelayDistribution::lognormal(1, 1),
      DelayDistribution::exponential(2.0), DelayDistribution::lognormal(1, 1).truncated_at_quantile(0.9)};
  for (const auto& d : laws) {
    RngStream rng(1, 1);
    std::uint64_t per = 0;
    for (int i = 0; i < 100; ++i) {
      const auto before = rng.draws();
      d.sample(rng);
      const auto used = rng.draws() - before;
      if (i == 0) per = used;
      REQUIRE(used == per);
    }
  }
}

TEST_CASE("invalid parameters are rejected at construction") {
  CHECK_THROWS_AS(DelayDistribution::uniform(1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(DelayDistribution::lognormal(0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(DelayDistribution::exponential(-1.0), InvalidParameter);
  CHECK_THROWS_AS(DelayDistribution::deterministic(-1.0), InvalidParameter);
  CHECK_THROWS_AS(DelayDistribution::uniform(0, 1).with_floor(-0.1), InvalidParameter);
  ChannelParams p;
  p.alpha = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p.alpha = 0.5;
  p.m_cap = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
}

TEST_CASE("sample_epoch examples") {
  ChannelParams lossless = uniform_channel(0.0);
  RngStream r0(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const EpochOutcome e = sample_epoch(lossless, r0);
    REQUIRE(e.M == 1);
    REQUIRE(e.D_v == 0.0);
  }

  const ChannelParams half = uniform_channel(0.5);
  double sum_m = 0.0, sum_dv = 0.0;
  for (std::uint64_t k = 0; k < 1000000; ++k) {
    RngStream rng(77, k);
    const EpochOutcome e = sample_epoch(half, rng, k);
    sum_m += e.M;
    sum_dv += e.D_v;
  }
  CHECK(std::abs(sum_m / 1e6 - 2.0) <= 0.01);
  CHECK(std::abs(sum_dv / 1e6 - 1.0) <= 0.01);
}

TEST_CASE("analytic moment examples") {
  const ChannelMoments z = analytic_moments(uniform_channel(0.0));
  CHECK(z.mean_Dv == 0.0);
  CHECK(z.m2_Dv == 0.0);

  const ChannelMoments u = analytic_moments(uniform_channel(0.5));
  CHECK(u.mean_Da == doctest::Approx(1.0));
  CHECK(u.m2_Da == doctest::Approx(7.0 / 6.0));
  CHECK(u.mean_Dv == doctest::Approx(1.0));
  CHECK(u.m2_Dv == doctest::Approx(19.0 / 6.0));

  ChannelParams det;
  det.alpha = 0.1;
  const ChannelMoments d = analytic_moments(det);
  CHECK(d.mean_M == doctest::Approx(10.0 / 9.0));
  CHECK(d.mean_Dv == doctest::Approx(2.0 / 9.0));
  CHECK(d.m2_Dv == doctest::Approx(4.0 / 9.0 + 2.0 * 0.01 / 0.81 * 4.0));
}

TEST_CASE("epoch moments match Monte Carlo within 4 standard errors") {
  std::vector<ChannelParams> cases;
  cases.push_back(uniform_channel(0.5));
  ChannelParams ln;
  ln.alpha = 0.1;
  ln.fwd = ln.bwd = DelayDistribution::lognormal(1.0, 1.0).truncated_at_quantile(0.999);
  cases.push_back(ln);
  ChannelParams ex;
  ex.alpha = 0.3;
  ex.fwd = DelayDistribution::exponential(1.0);
  ex.bwd = DelayDistribution::deterministic(0.5);
  cases.push_back(ex);

  for (const auto& p : cases) {
    CAPTURE(p.describe());
    const ChannelMoments mo = analytic_moments(p);
    Welford M, da, da2, dv, dv2;
    for (std::uint64_t k = 0; k < 1000000; ++k) {
      RngStream rng(2024, k);
      const EpochOutcome e = sample_epoch(p, rng, k);
      M.add(e.M);
      da.add(e.D_a);
      da2.add(e.D_a * e.D_a);
      dv.add(e.D_v);
      dv2.add(e.D_v * e.D_v);
    }
    CHECK(std::abs(M.mean - mo.mean_M) <= 4 * M.se());
    CHECK(std::abs(da.mean - mo.mean_Da) <= 4 * da.se());
    CHECK(std::abs(da2.mean - mo.m2_Da) <= 4 * da2.se());
    CHECK(std::abs(dv.mean - mo.mean_Dv) <= 4 * dv.se());
    CHECK(std::abs(dv2.mean - mo.m2_Dv) <= 4 * dv2.se());
  }
}

TEST_CASE("epoch invariants under fuzzing") {
  const std::vector<DelayDistribution> laws = {
      DelayDistribution::deterministic(0.7),
      DelayDistribution::uniform(0.0, 3.0),
      DelayDistribution::lognormal(1.0, 1.8),
      DelayDistribution::exponential(0.5),
      DelayDistribution::lognormal(1.0, 1.0).truncated_at_quantile(0.999),
      DelayDistribution::exponential(1.0).with_floor(0.1).truncated(3.0, Truncation::clamp),
  };
  RngStream pick(5, 5);
  for (std::uint64_t k = 0; k < 100000; ++k) {
    ChannelParams p;
    p.alpha = 0.9 * pick.next_uniform();
    p.fwd = laws[pick.next_u64() % laws.size()];
    p.bwd = laws[pick.next_u64() % laws.size()];
    p.m_cap = 1 + static_cast<std::uint32_t>(pick.next_u64() % 8);
    RngStream rng(k, k);
    EpochOutcome e = sample_epoch(p, rng, k);
    REQUIRE(e.M == 1 + e.failed_attempts.size());
    REQUIRE(e.M <= p.m_cap);
    REQUIRE(e.D_a == e.first_attempt.d_f + e.first_attempt.d_b);
    double dv = 0.0;
    for (const auto& a : e.failed_attempts) dv += a.d_f + a.d_b;
    REQUIRE(e.D_v == dv);
    REQUIRE((e.D_v == 0.0) == (e.M == 1));
    e.set_wait(1.25);
    REQUIRE(e.L == e.D_a + 1.25 + e.D_v);
  }
}

TEST_CASE("epoch streams are reproducible") {
  ChannelParams p;
  p.alpha = 0.4;
  p.fwd = DelayDistribution::lognormal(1.0, 1.5);
  p.bwd = DelayDistribution::exponential(0.3);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    RngStream a(31, k), b(31, k);
    const EpochOutcome x = sample_epoch(p, a, k), y = sample_epoch(p, b, k);
    REQUIRE(x.M == y.M);
    REQUIRE(std::memcmp(&x.D_a, &y.D_a, sizeof(double)) == 0);
    REQUIRE(std::memcmp(&x.D_v, &y.D_v, sizeof(double)) == 0);
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-10, 0.001, 0.1, 0.5, 0.9, 0.999, 1 - 1e-10})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
}
