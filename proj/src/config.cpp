#include "aoi/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

#include "aoi/errors.hpp"

namespace aoi {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw InvalidParameter(std::string("config: missing number '") + key + "'");
  return j.at(key).get<double>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidParameter(std::string("config: unknown key '") + key + "' in " + where);
  }
}

Truncation parse_mode(const json& j) {
  const std::string mode = j.value("truncation_mode", std::string("reject"));
  if (mode == "reject") return Truncation::reject;
  if (mode == "clamp") return Truncation::clamp;
  throw InvalidParameter("config: truncation_mode must be 'reject' or 'clamp'");
}

} // namespace

DelayDistribution parse_delay(const json& j) {
  if (!j.is_object()) throw InvalidParameter("config: delay law must be an object");
  reject_unknown(j, {"kind", "value", "a", "b", "mu", "sigma", "rate", "epsilon", "truncate_upper", "truncate_quantile",
                     "truncation_mode"},
                 "delay law");
  const std::string kind = j.value("kind", std::string());
  DelayDistribution d = DelayDistribution::deterministic(0.0);
  if (kind == "deterministic")
    d = DelayDistribution::deterministic(number(j, "value"));
  else if (kind == "uniform")
    d = DelayDistribution::uniform(number(j, "a"), number(j, "b"));
  else if (kind == "lognormal")
    d = DelayDistribution::lognormal(number(j, "mu"), number(j, "sigma"));
  else if (kind == "exponential")
    d = DelayDistribution::exponential(number(j, "rate"));
  else
    throw InvalidParameter("config: unknown delay kind '" + kind + "'");

  if (j.contains("epsilon")) d = d.with_floor(number(j, "epsilon"));
  if (j.contains("truncate_upper") && j.contains("truncate_quantile"))
    throw InvalidParameter("config: give truncate_upper or truncate_quantile, not both");
  if (j.contains("truncate_upper")) d = d.truncated(number(j, "truncate_upper"), parse_mode(j));
  if (j.contains("truncate_quantile")) d = d.truncated_at_quantile(number(j, "truncate_quantile"), parse_mode(j));
  return d;
}

ChannelParams parse_channel(const json& j) {
  reject_unknown(j, {"alpha", "forward", "backward", "m_cap"}, "channel");
  ChannelParams c;
  c.alpha = number(j, "alpha");
  c.fwd = parse_delay(j.at("forward"));
  c.bwd = parse_delay(j.at("backward"));
  if (j.contains("m_cap")) c.m_cap = j.at("m_cap").get<std::uint32_t>();
  c.validate();
  return c;
}

FrequencyCap parse_frequency_cap(const json& j, const ChannelParams& channel) {
  if (j.is_null()) return FrequencyCap::unlimited();
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return FrequencyCap::unlimited();
    throw InvalidParameter("config: f_max string must be \"inf\"");
  }
  if (j.is_number()) return FrequencyCap::of(j.get<double>());
  if (j.is_object() && j.contains("mean_round_trip_multiple")) {
    // 1/f_max = c (E[DF] + E[DB])
    const double c = number(j, "mean_round_trip_multiple");
    if (!(c > 0.0)) throw InvalidParameter("config: mean_round_trip_multiple must be > 0");
    return FrequencyCap::of(1.0 / (c * (channel.fwd.mean() + channel.bwd.mean())));
  }
  throw InvalidParameter("config: f_max must be \"inf\", a number, or {\"mean_round_trip_multiple\": c}");
}

MomentPriors parse_priors(const json& j) {
  reject_unknown(j, {"DF_mean_lb", "DF_mean_ub", "DB_mean_lb", "DB_mean_ub", "Dv_mean_lb", "Dv_mean_ub", "H_ub",
                     "DF_max", "DB_max", "M_max"},
                 "learner.priors");
  MomentPriors p;
  p.DF_mean_lb = number(j, "DF_mean_lb");
  p.DF_mean_ub = number(j, "DF_mean_ub");
  p.DB_mean_lb = number(j, "DB_mean_lb");
  p.DB_mean_ub = number(j, "DB_mean_ub");
  p.Dv_mean_lb = number(j, "Dv_mean_lb");
  p.Dv_mean_ub = number(j, "Dv_mean_ub");
  p.H_ub = number(j, "H_ub");
  if (j.contains("DF_max")) p.DF_max = number(j, "DF_max");
  if (j.contains("DB_max")) p.DB_max = number(j, "DB_max");
  if (j.contains("M_max")) p.M_max = j.at("M_max").get<std::uint32_t>();
  return p;
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, {"channel", "policy", "horizon_epochs", "f_max", "V", "seed", "trace_stride", "exclude_warmup",
                     "learner", "oracle", "ensemble"},
                 "config");
  ExperimentConfig x;
  RunConfig& r = x.run;
  r.channel = parse_channel(j.at("channel"));
  r.policy = PolicySpec::parse(j.value("policy", std::string("online")));
  r.horizon_epochs = j.value("horizon_epochs", std::uint64_t{1000});
  r.f_max = parse_frequency_cap(j.contains("f_max") ? j.at("f_max") : json(), r.channel);
  r.V = j.value("V", 50.0);
  r.seed = j.value("seed", std::uint64_t{1});
  r.trace_stride = j.value("trace_stride", std::uint64_t{1});
  r.exclude_warmup = j.value("exclude_warmup", false);

  if (j.contains("learner")) {
    const json& l = j.at("learner");
    reject_unknown(l, {"priors", "momentum_a", "gamma0", "warmup_epochs", "cap_factor"}, "learner");
    r.momentum_a = l.value("momentum_a", 0.005);
    r.gamma0 = l.value("gamma0", 0.0);
    const json pri = l.contains("priors") ? l.at("priors") : json("exact");
    if (pri.is_string()) {
      const std::string mode = pri.get<std::string>();
      if (mode == "exact")
        r.priors.mode = PriorMode::exact;
      else if (mode == "none")
        r.priors.mode = PriorMode::none;
      else
        throw InvalidParameter("config: learner.priors must be \"exact\", \"none\", or an object");
    } else {
      r.priors.mode = PriorMode::specified;
      r.priors.priors = parse_priors(pri);
    }
    r.priors.warmup_epochs = l.value("warmup_epochs", std::uint64_t{100});
    r.priors.cap_factor = l.value("cap_factor", 10.0);
  }

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    reject_unknown(o, {"n", "tol", "seed", "prefer_exact"}, "oracle");
    x.oracle.n = o.value("n", x.oracle.n);
    x.oracle.tol = o.value("tol", x.oracle.tol);
    x.oracle.crn_seed = o.value("seed", x.oracle.crn_seed);
    x.oracle.prefer_exact = o.value("prefer_exact", true);
  }

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    reject_unknown(e, {"n_seeds", "checkpoints", "variants", "workers"}, "ensemble");
    x.n_seeds = e.value("n_seeds", std::size_t{20});
    x.checkpoints = e.value("checkpoints", std::vector<std::uint64_t>{});
    for (const auto& v : e.value("variants", std::vector<std::string>{})) x.variants.push_back(PolicySpec::parse(v));
    x.workers = e.value("workers", 0u);
  }
  r.validate();
  return x;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidParameter("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

EnsembleSpec ExperimentConfig::ensemble() const {
  EnsembleSpec s;
  s.base = run;
  s.n_seeds = n_seeds;
  s.checkpoints = checkpoints.empty() ? std::vector<std::uint64_t>{run.horizon_epochs} : checkpoints;
  s.variants = variants;
  s.workers = workers;
  return s;
}

json to_json(const OracleSolution& s) {
  return {{"gamma_star", s.gamma_star}, {"nu_star", s.nu_star},       {"theta_star", s.theta_star},
          {"aoi_opt", s.aoi_opt},       {"L_star", s.L_star},         {"n_samples", s.n_samples},
          {"ci_halfwidth", s.ci_halfwidth}, {"aoi_std_error", s.aoi_std_error}, {"method", s.method}};
}

json to_json(const RunSummary& s) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  json j = {{"epochs", s.epochs},
            {"time_avg_aoi", num(s.time_avg_aoi)},
            {"mean_sampling_interval", num(s.mean_sampling_interval)},
            {"final_gamma", num(s.final_gamma)},
            {"final_nu", num(s.final_nu)},
            {"regret", num(s.regret)},
            {"elapsed", s.elapsed},
            {"cum_aoi", s.cum_aoi},
            {"total_samples", s.total_samples}};
  if (s.bounds) j["gamma_bounds"] = {s.bounds->gamma_lb, s.bounds->gamma_ub};
  return j;
}

} // namespace aoi
