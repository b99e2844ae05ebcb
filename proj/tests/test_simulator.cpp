#include <doctest.h>

#include <cmath>
#include <cstring>

#include "aoi/errors.hpp"
#include "aoi/simulator.hpp"
#include "support/event_integrator.hpp"

using namespace aoi;

namespace {

RunConfig det_run(PolicySpec policy, std::uint64_t K) {
  RunConfig c;
  c.policy = policy;
  c.horizon_epochs = K;
  c.trace_stride = 1;
  return c;
}

PolicySpec fixed(double theta) {
  PolicySpec p;
  p.kind = PolicyKind::fixed_threshold;
  p.theta = theta;
  return p;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("epoch_aoi examples") {
  CHECK(epoch_aoi(1.0, 4.0, 6.0) == 22.0);
  CHECK(epoch_aoi(3.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("policy spec parsing") {
  CHECK(PolicySpec::parse("online").kind == PolicyKind::online);
  CHECK(PolicySpec::parse("online_momentum").kind == PolicyKind::online_momentum);
  CHECK(PolicySpec::parse("constant_wait").kind == PolicyKind::constant_wait);
  CHECK(PolicySpec::parse("zero_wait").kind == PolicyKind::zero_wait);
  const auto f = PolicySpec::parse("fixed_threshold(4.5)");
  CHECK(f.kind == PolicyKind::fixed_threshold);
  CHECK(f.theta == 4.5);
  CHECK(PolicySpec::parse(f.name()).theta == 4.5);
  CHECK_THROWS_AS(PolicySpec::parse("fixed_threshold(x)"), InvalidParameter);
  CHECK_THROWS_AS(PolicySpec::parse("greedy"), InvalidParameter);
}

TEST_CASE("zero wait and fixed threshold on the deterministic channel") {
  RunConfig z = det_run(PolicySpec::parse("zero_wait"), 100);
  z.exclude_warmup = true;
  const RunResult zr = run(z);
  CHECK(zr.summary.time_avg_aoi == doctest::Approx(2.0).epsilon(1e-12));

  RunConfig t = det_run(fixed(4.0), 100);
  t.exclude_warmup = true;
  const RunResult tr = run(t);
  CHECK(tr.summary.time_avg_aoi == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(tr.summary.mean_sampling_interval == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("online learner converges on the deterministic channel") {
  const RunResult r = run(det_run(PolicySpec::parse("online"), 10000));
  CHECK(std::abs(r.summary.final_gamma - 1.0) <= 0.05);
}

TEST_CASE("regret examples") {
  OracleSolution opt;
  opt.aoi_opt = 2.0;

  const RunResult best = run(det_run(fixed(1.0), 200));
  for (double v : regret(best, opt, true)) CHECK(std::abs(v) <= 1e-9);

  const RunResult zw = run(det_run(PolicySpec::parse("zero_wait"), 200));
  for (double v : regret(zw, opt, true)) CHECK(std::abs(v) <= 1e-9);

  const RunResult far = run(det_run(fixed(4.0), 200));
  const auto r = regret(far, opt);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double K = static_cast<double>(far.records[i].k);
    CHECK(r[i] == doctest::Approx(4.0 * (K - 1.0)).epsilon(1e-12));
  }

  RunConfig with_ref = det_run(fixed(4.0), 50);
  with_ref.aoi_reference = 2.0;
  const RunResult wr = run(with_ref);
  CHECK(wr.summary.regret == doctest::Approx(4.0 * 49.0));
}

TEST_CASE("fast accounting equals the event-level integral") {
  RngStream pick(12, 0);
  const std::vector<DelayDistribution> laws = {
      DelayDistribution::uniform(0.0, 2.0), DelayDistribution::lognormal(1.0, 1.0),
      DelayDistribution::exponential(0.5), DelayDistribution::deterministic(0.7)};
  const char* policies[] = {"online", "online_momentum", "zero_wait", "constant_wait", "fixed_threshold(3)"};
  for (int c = 0; c < 40; ++c) {
    RunConfig cfg;
    cfg.channel.alpha = 0.6 * pick.next_uniform();
    cfg.channel.fwd = laws[pick.next_u64() % laws.size()];
    cfg.channel.bwd = laws[pick.next_u64() % laws.size()];
    cfg.policy = PolicySpec::parse(policies[pick.next_u64() % 5]);
    cfg.f_max = pick.next_uniform() < 0.5 ? FrequencyCap::unlimited() : FrequencyCap::of(0.05 + pick.next_uniform());
    cfg.horizon_epochs = 1 + pick.next_u64() % 500;
    cfg.seed = pick.next_u64();
    cfg.keep_epochs = true;
    cfg.trace_stride = 7;
    const RunResult r = run(cfg);
    const auto ev = testing::integrate_events(r.epochs);
    CAPTURE(c);
    CHECK(ev.area == doctest::Approx(r.summary.cum_aoi).epsilon(1e-9));
    CHECK(ev.horizon == doctest::Approx(r.summary.elapsed).epsilon(1e-12));
    CHECK(ev.receptions == cfg.horizon_epochs);
    CHECK(ev.max_reset_error <= 1e-9 * std::max(1.0, ev.horizon));
  }
}

TEST_CASE("identical config and seed give identical results") {
  RunConfig cfg;
  cfg.channel.alpha = 0.2;
  cfg.channel.fwd = cfg.channel.bwd = DelayDistribution::lognormal(1.0, 1.5);
  cfg.horizon_epochs = 2000;
  cfg.trace_stride = 10;
  cfg.seed = 99;
  const RunResult a = run(cfg), b = run(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(same_bits(a.records[i].gamma, b.records[i].gamma));
    REQUIRE(same_bits(a.records[i].cum_aoi, b.records[i].cum_aoi));
  }
  cfg.seed = 100;
  CHECK_FALSE(same_bits(run(cfg).summary.cum_aoi, a.summary.cum_aoi));
}

TEST_CASE("momentum with a = 1 reproduces the vanilla trace") {
  RunConfig cfg;
  cfg.channel.alpha = 0.1;
  cfg.channel.fwd = cfg.channel.bwd = DelayDistribution::lognormal(1.0, 1.5);
  cfg.f_max = FrequencyCap::of(0.02);
  cfg.horizon_epochs = 3000;
  const RunResult v = run(cfg);
  cfg.policy = PolicySpec::parse("online_momentum");
  cfg.momentum_a = 1.0;
  const RunResult m = run(cfg);
  REQUIRE(v.records.size() == m.records.size());
  for (std::size_t i = 0; i < v.records.size(); ++i) {
    REQUIRE(same_bits(v.records[i].gamma, m.records[i].gamma));
    REQUIRE(same_bits(v.records[i].cum_aoi, m.records[i].cum_aoi));
  }
}

TEST_CASE("trace stride and checkpoints") {
  RunConfig cfg = det_run(PolicySpec::parse("zero_wait"), 1000);
  cfg.trace_stride = 300;
  cfg.checkpoints = {10, 450};
  const RunResult r = run(cfg);
  std::vector<std::uint64_t> ks;
  for (const auto& rec : r.records) ks.push_back(rec.k);
  CHECK(ks == std::vector<std::uint64_t>{10, 300, 450, 600, 900, 1000});
}

TEST_CASE("prior-free learner") {
  RunConfig cfg;
  cfg.channel.alpha = 0.5;
  cfg.channel.fwd = cfg.channel.bwd = DelayDistribution::uniform(0.0, 1.0);
  cfg.priors.mode = PriorMode::none;
  cfg.horizon_epochs = 20000;
  const RunResult r = run(cfg);
  REQUIRE(r.summary.bounds.has_value());
  CHECK(r.summary.bounds->gamma_lb == 0.0);
  CHECK(r.summary.bounds->gamma_ub > 1.0);
  CHECK(std::abs(r.summary.final_gamma - 0.58096) <= 0.1);
}

TEST_CASE("frequency audit on a constrained deterministic run") {
  RunConfig cfg = det_run(PolicySpec::parse("online"), 20000);
  cfg.f_max = FrequencyCap::of(0.25);
  cfg.trace_stride = 1000;
  const RunResult r = run(cfg);
  CHECK(r.summary.mean_sampling_interval >= 4.0 * 0.98);
  CHECK(r.summary.time_avg_aoi == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("invalid run configs") {
  RunConfig cfg;
  cfg.horizon_epochs = 0;
  CHECK_THROWS_AS(run(cfg), InvalidParameter);
  cfg.horizon_epochs = 1;
  cfg.trace_stride = 0;
  CHECK_THROWS_AS(run(cfg), InvalidParameter);
  cfg.trace_stride = 1;
  cfg.V = 0.0;
  CHECK_THROWS_AS(run(cfg), InvalidParameter);
}
