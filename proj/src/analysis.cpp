#include "aoi/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "aoi/errors.hpp"
#include "aoi/rng.hpp"

namespace aoi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return {kNaN, kNaN};
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return s;
}

} // namespace

void EnsembleSpec::validate() const {
  base.validate();
  if (n_seeds < 1) throw InvalidParameter("n_seeds must be >= 1");
  if (checkpoints.empty()) throw InvalidParameter("ensemble needs at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1) throw InvalidParameter("checkpoints must be >= 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw InvalidParameter("checkpoints must be strictly increasing");
  }
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t i) { return derive_seed(base_seed, i); }

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AOI_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SummaryRow> aggregate(std::vector<SeedRow> rows) {
  if (rows.empty()) return {};
  for (const auto& r : rows)
    if (r.channel != rows.front().channel) throw MixedChannels("cannot aggregate runs from different channels");
  // Sorting fixes the summation order, so the result ignores input order.
  std::sort(rows.begin(), rows.end(), [](const SeedRow& a, const SeedRow& b) {
    return std::tie(a.variant, a.K, a.seed) < std::tie(b.variant, b.K, b.seed);
  });
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> aoi, gamma, sq, reg, iv;
    while (j < rows.size() && rows[j].variant == rows[i].variant && rows[j].K == rows[i].K) {
      aoi.push_back(rows[j].aoi);
      gamma.push_back(rows[j].gamma);
      sq.push_back(rows[j].sq_err);
      reg.push_back(rows[j].regret);
      iv.push_back(rows[j].interval);
      ++j;
    }
    SummaryRow s;
    s.variant = rows[i].variant;
    s.K = rows[i].K;
    s.n = j - i;
    auto put = [](const std::vector<double>& v, double& mean, double& sd) {
      const Stats st = stats(v);
      mean = st.mean;
      sd = st.std;
    };
    put(aoi, s.aoi_mean, s.aoi_std);
    put(gamma, s.gamma_mean, s.gamma_std);
    put(sq, s.sq_err_mean, s.sq_err_std);
    put(reg, s.regret_mean, s.regret_std);
    put(iv, s.interval_mean, s.interval_std);
    out.push_back(s);
    i = j;
  }
  return out;
}

EnsembleTable run_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  std::vector<PolicySpec> variants = spec.variants;
  if (variants.empty()) variants.push_back(spec.base.policy);

  struct Job {
    std::size_t variant;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (std::size_t r = 0; r < spec.n_seeds; ++r) jobs.push_back({v, r});

  const std::string channel = spec.base.channel.describe();
  std::vector<std::vector<SeedRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());

  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        RunConfig cfg = spec.base;
        cfg.policy = variants[jobs[j].variant];
        cfg.seed = replicate_seed(spec.base.seed, jobs[j].replicate);
        cfg.horizon_epochs = spec.checkpoints.back();
        cfg.trace_stride = cfg.horizon_epochs;
        cfg.checkpoints = spec.checkpoints;
        cfg.keep_epochs = false;
        if (spec.oracle) cfg.aoi_reference = spec.oracle->aoi_opt;
        const RunResult res = run(cfg);
        for (const auto& rec : res.records) {
          if (!std::binary_search(spec.checkpoints.begin(), spec.checkpoints.end(), rec.k)) continue;
          SeedRow row;
          row.variant = cfg.policy.name();
          row.seed = cfg.seed;
          row.K = rec.k;
          row.aoi = rec.time_avg_aoi;
          row.gamma = rec.gamma;
          row.sq_err = spec.oracle ? (rec.gamma - spec.oracle->gamma_star) * (rec.gamma - spec.oracle->gamma_star) : kNaN;
          row.regret = rec.regret;
          row.interval = rec.mean_interval;
          row.channel = channel;
          results[j].push_back(row);
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  const unsigned n_workers = std::min<unsigned>(resolve_workers(spec.workers), static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Deterministic merge order: (variant, replicate), i.e. job order.
  EnsembleTable table;
  for (auto& r : results) table.per_seed.insert(table.per_seed.end(), r.begin(), r.end());
  table.summary = aggregate(table.per_seed);
  // aggregate() orders variants by name; restore the requested variant order.
  std::stable_sort(table.summary.begin(), table.summary.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    auto rank = [&](const std::string& name) {
      for (std::size_t v = 0; v < variants.size(); ++v)
        if (variants[v].name() == name) return v;
      return variants.size();
    };
    return rank(a.variant) < rank(b.variant);
  });
  return table;
}

FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateFit("fit: x and y differ in length");
  if (x.size() < 3) throw DegenerateFit("fit: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateFit("fit: regressor has zero variance");
  FitReport f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.n_points = x.size();
  return f;
}

FitQuantity parse_fit_quantity(const std::string& text) {
  if (text == "mse_gamma") return FitQuantity::mse_gamma;
  if (text == "regret_over_lnK") return FitQuantity::regret_over_lnK;
  throw InvalidParameter("unknown fit quantity '" + text + "' (mse_gamma | regret_over_lnK)");
}

FitReport fit_error_decay(const std::vector<SummaryRow>& rows, FitQuantity quantity) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (r.variant != rows.front().variant) throw InvalidParameter("fit: rows span several variants");
    if (r.K < 1) throw DegenerateFit("fit: checkpoint K must be >= 1");
    x.push_back(std::log(static_cast<double>(r.K)));
    if (quantity == FitQuantity::mse_gamma) {
      if (!(r.sq_err_mean > 0.0)) throw DegenerateFit("fit: mean squared error must be positive for a log fit");
      y.push_back(std::log(r.sq_err_mean));
    } else {
      y.push_back(r.regret_mean);
    }
  }
  return fit_line(x, y);
}

std::vector<CompareRow> compare_variance(const std::vector<SeedRow>& a, const std::vector<SeedRow>& b) {
  auto index = [](const std::vector<SeedRow>& rows) {
    std::map<std::uint64_t, std::map<std::uint64_t, const SeedRow*>> by_k;
    for (const auto& r : rows) {
      if (r.variant != rows.front().variant) throw InvalidParameter("compare: each table must hold one variant");
      by_k[r.K][r.seed] = &r;
    }
    return by_k;
  };
  if (a.empty() || b.empty()) throw UnpairedSeeds("compare: empty table");
  if (a.front().channel != b.front().channel) throw MixedChannels("compare: tables come from different channels");
  const auto ia = index(a), ib = index(b);
  if (ia.size() != ib.size()) throw UnpairedSeeds("compare: checkpoint sets differ");

  std::vector<CompareRow> out;
  for (const auto& [K, seeds_a] : ia) {
    const auto it = ib.find(K);
    if (it == ib.end() || it->second.size() != seeds_a.size()) throw UnpairedSeeds("compare: checkpoint sets differ");
    std::vector<double> ga, gb, ea, eb;
    for (const auto& [seed, ra] : seeds_a) {
      const auto jt = it->second.find(seed);
      if (jt == it->second.end()) throw UnpairedSeeds("compare: seed sets differ");
      ga.push_back(ra->gamma);
      gb.push_back(jt->second->gamma);
      ea.push_back(ra->sq_err);
      eb.push_back(jt->second->sq_err);
    }
    CompareRow row;
    row.K = K;
    row.n = ga.size();
    row.std_a = stats(ga).std;
    row.std_b = stats(gb).std;
    row.mse_a = stats(ea).mean;
    row.mse_b = stats(eb).mean;
    constexpr double tiny = 1e-12;
    if (row.std_a > tiny) row.std_ratio = row.std_b / row.std_a;
    if (row.mse_a > tiny) row.mse_ratio = row.mse_b / row.mse_a;
    out.push_back(row);
  }
  return out;
}

} // namespace aoi
