#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aoi/analysis.hpp"
#include "aoi/csv.hpp"
#include "aoi/errors.hpp"

using namespace aoi;

namespace {

EnsembleSpec small_spec() {
  EnsembleSpec s;
  s.base.channel.alpha = 0.1;
  s.base.channel.fwd = s.base.channel.bwd = DelayDistribution::lognormal(1.0, 1.0).truncated_at_quantile(0.999);
  s.base.horizon_epochs = 1000;
  s.n_seeds = 4;
  s.checkpoints = {10, 100, 1000};
  s.workers = 2;
  return s;
}

std::vector<SeedRow> synthetic_rows() {
  std::vector<SeedRow> rows;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    for (std::uint64_t K : {10u, 100u, 1000u}) {
      SeedRow r;
      r.variant = "online";
      r.seed = seed;
      r.K = K;
      r.aoi = 3.0 + 0.1 * seed + 1.0 / K;
      r.gamma = 1.0 + 0.01 * seed;
      r.sq_err = 1e-4 * seed;
      r.regret = 2.0 * seed;
      r.interval = 4.0;
      r.channel = "c";
      rows.push_back(r);
    }
  return rows;
}

} // namespace

TEST_CASE("line fits recover exact laws") {
  std::vector<SummaryRow> power, logs;
  for (std::uint64_t K : {100u, 1000u, 10000u, 100000u}) {
    SummaryRow r;
    r.variant = "x";
    r.K = K;
    r.sq_err_mean = 7.0 / static_cast<double>(K);
    r.regret_mean = 3.5 * std::log(static_cast<double>(K));
    power.push_back(r);
  }
  const FitReport a = fit_error_decay(power, FitQuantity::mse_gamma);
  CHECK(std::abs(a.slope + 1.0) <= 1e-10);
  CHECK(std::abs(a.r2 - 1.0) <= 1e-12);
  const FitReport b = fit_error_decay(power, FitQuantity::regret_over_lnK);
  CHECK(std::abs(b.slope - 3.5) <= 1e-10);
  CHECK(std::abs(b.r2 - 1.0) <= 1e-12);
  CHECK(b.n_points == 4);

  CHECK_THROWS_AS(fit_line({1.0, 2.0}, {1.0, 2.0}), DegenerateFit);
  CHECK_THROWS_AS(fit_line({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DegenerateFit);
  CHECK(parse_fit_quantity("mse_gamma") == FitQuantity::mse_gamma);
  CHECK_THROWS_AS(parse_fit_quantity("bogus"), InvalidParameter);
}

TEST_CASE("ensemble shape, single seed, and determinism across worker counts") {
  EnsembleSpec s = small_spec();
  s.variants = {PolicySpec::parse("online"), PolicySpec::parse("constant_wait")};
  const EnsembleTable t = run_ensemble(s);
  CHECK(t.per_seed.size() == 2 * 4 * 3);
  CHECK(t.summary.size() == 2 * 3);
  for (const auto& r : t.summary) CHECK(r.n == 4);

  EnsembleSpec one = s;
  one.workers = 1;
  const EnsembleTable u = run_ensemble(one);
  REQUIRE(u.per_seed.size() == t.per_seed.size());
  for (std::size_t i = 0; i < u.per_seed.size(); ++i) {
    CHECK(u.per_seed[i].variant == t.per_seed[i].variant);
    CHECK(u.per_seed[i].seed == t.per_seed[i].seed);
    CHECK(u.per_seed[i].aoi == t.per_seed[i].aoi);
  }

  // The two variants saw identical seeds.
  std::vector<std::uint64_t> sa, sb;
  for (const auto& r : t.per_seed) (r.variant == "online" ? sa : sb).push_back(r.seed);
  CHECK(sa == sb);

  EnsembleSpec single = small_spec();
  single.n_seeds = 1;
  const EnsembleTable st = run_ensemble(single);
  RunConfig cfg = single.base;
  cfg.seed = replicate_seed(single.base.seed, 0);
  cfg.checkpoints = single.checkpoints;
  cfg.trace_stride = cfg.horizon_epochs;
  const RunResult rr = run(cfg);
  REQUIRE(st.per_seed.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(st.per_seed[i].K == rr.records[i].k);
    CHECK(st.per_seed[i].aoi == rr.records[i].time_avg_aoi);
    CHECK(st.per_seed[i].gamma == rr.records[i].gamma);
  }
}

TEST_CASE("aggregation ignores row order") {
  auto rows = synthetic_rows();
  const auto a = aggregate(rows);
  std::reverse(rows.begin(), rows.end());
  std::rotate(rows.begin(), rows.begin() + 4, rows.end());
  const auto b = aggregate(rows);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].K == b[i].K);
    CHECK(a[i].aoi_mean == b[i].aoi_mean);
    CHECK(a[i].aoi_std == b[i].aoi_std);
    CHECK(a[i].sq_err_mean == b[i].sq_err_mean);
  }
  rows[0].channel = "other";
  CHECK_THROWS_AS(aggregate(rows), MixedChannels);
}

TEST_CASE("paired comparison") {
  const auto rows = synthetic_rows();
  const auto same = compare_variance(rows, rows);
  REQUIRE(same.size() == 3);
  for (const auto& r : same) {
    REQUIRE(r.std_ratio.has_value());
    CHECK(*r.std_ratio == 1.0);
    CHECK(*r.mse_ratio == 1.0);
  }
  auto flat = rows;
  for (auto& r : flat) {
    r.gamma = 1.0;
    r.sq_err = 0.0;
  }
  const auto na = compare_variance(flat, flat);
  CHECK_FALSE(na[0].std_ratio.has_value());
  CHECK_FALSE(na[0].mse_ratio.has_value());

  auto missing = rows;
  missing.pop_back();
  CHECK_THROWS_AS(compare_variance(rows, missing), UnpairedSeeds);
}

TEST_CASE("momentum with a = 1 compares as identical") {
  EnsembleSpec s = small_spec();
  s.base.momentum_a = 1.0;
  s.variants = {PolicySpec::parse("online")};
  const auto v = run_ensemble(s);
  s.variants = {PolicySpec::parse("online_momentum")};
  auto m = run_ensemble(s);
  for (auto& r : m.per_seed) r.variant = "online";
  for (const auto& r : compare_variance(v.per_seed, m.per_seed)) {
    REQUIRE(r.std_ratio.has_value());
    CHECK(*r.std_ratio == 1.0);
  }
}

TEST_CASE("csv tables round-trip") {
  SUBCASE("seed and summary rows") {
    auto rows = synthetic_rows();
    rows[0].variant = "fixed_threshold(1.5)";
    rows[1].regret = std::numeric_limits<double>::quiet_NaN();
    for (auto& r : rows) r.channel = "alpha=0.1, \"quoted\", fwd";
    std::stringstream ss;
    csv::write_seed_rows(ss, rows);
    CHECK(csv::peek_schema(ss) == csv::kSeedSchema);
    const auto back = csv::read_seed_rows(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(back[i].variant == rows[i].variant);
      CHECK(back[i].channel == rows[i].channel);
      CHECK(back[i].seed == rows[i].seed);
      CHECK(back[i].aoi == rows[i].aoi);
      if (std::isnan(rows[i].regret))
        CHECK(std::isnan(back[i].regret));
      else
        CHECK(back[i].regret == rows[i].regret);
    }
    const auto sum = aggregate(rows);
    std::stringstream s2;
    csv::write_summary_rows(s2, sum);
    const auto sback = csv::read_summary_rows(s2);
    REQUIRE(sback.size() == sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
      CHECK(sback[i].aoi_std == sum[i].aoi_std);
      CHECK(sback[i].n == sum[i].n);
    }
  }
  SUBCASE("trace") {
    RunConfig cfg;
    cfg.channel.alpha = 0.3;
    cfg.channel.fwd = DelayDistribution::exponential(0.4);
    cfg.horizon_epochs = 200;
    cfg.aoi_reference = 2.5;
    const auto recs = run(cfg).records;
    std::stringstream ss;
    csv::write_trace(ss, recs);
    const auto back = csv::read_trace(ss);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].k == recs[i].k);
      CHECK(back[i].gamma == recs[i].gamma);
      CHECK(back[i].cum_aoi == recs[i].cum_aoi);
      CHECK(back[i].regret == recs[i].regret);
      CHECK(back[i].M == recs[i].M);
    }
  }
  SUBCASE("compare and oracle") {
    std::vector<CompareRow> rows(2);
    rows[0].K = 10;
    rows[0].std_ratio = 0.5;
    rows[0].mse_ratio = 0.25;
    rows[1].K = 20;
    std::stringstream ss;
    csv::write_compare_rows(ss, rows);
    const auto back = csv::read_compare_rows(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].std_ratio == 0.5);
    CHECK_FALSE(back[1].std_ratio.has_value());

    OracleSolution o;
    o.gamma_star = 1.0 / 3.0;
    o.aoi_opt = 2.0;
    o.method = "exact+bisection";
    std::stringstream so;
    csv::write_oracle(so, o);
    const auto ob = csv::read_oracle(so);
    CHECK(ob.gamma_star == o.gamma_star);
    CHECK(ob.method == o.method);
  }
  SUBCASE("wrong schema is rejected") {
    std::stringstream ss;
    csv::write_compare_rows(ss, {});
    CHECK_THROWS_AS(csv::read_seed_rows(ss), Error);
  }
}

TEST_CASE("ensemble validation") {
  EnsembleSpec s = small_spec();
  s.checkpoints = {100, 10};
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s.checkpoints = {10};
  s.n_seeds = 0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
}
