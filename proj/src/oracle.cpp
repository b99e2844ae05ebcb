#include "aoi/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/errors.hpp"

namespace aoi {

DelayPool draw_delay_pool(const ChannelParams& params, std::size_t n, std::uint64_t crn_seed) {
  params.validate();
  DelayPool pool;
  pool.d_f.reserve(n);
  pool.d_a.reserve(n);
  pool.d_v.reserve(n);
  pool.M.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(crn_seed, i);
    const EpochOutcome e = sample_epoch(params, rng, i);
    pool.d_f.push_back(e.first_attempt.d_f);
    pool.d_a.push_back(e.D_a);
    pool.d_v.push_back(e.D_v);
    pool.M.push_back(e.M);
  }
  return pool;
}

namespace {

// Welford accumulator for a mean and its standard error.
struct MeanAcc {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

// E[(X - t)_+^p] for X uniform on [a, b] (a < b), p in {1, 2}.
double hinge_uniform(double a, double b, double t, int p) {
  const double hi = pos(b - t), lo = pos(a - t);
  if (p == 1) return (hi * hi - lo * lo) / (2.0 * (b - a));
  return (hi * hi * hi - lo * lo * lo) / (3.0 * (b - a));
}

// E[(X + Y - t)_+^p] for independent X ~ U[a1,b1], Y ~ U[a2,b2].
double hinge_uniform_sum(double a1, double b1, double a2, double b2, double t, int p) {
  auto q = [p](double x) {
    const double y = pos(x);
    const double y2 = y * y;
    return p == 1 ? y2 * y / 6.0 : y2 * y2 / 12.0;
  };
  const double num = q(b1 + b2 - t) - q(a1 + b2 - t) - q(b1 + a2 - t) + q(a1 + a2 - t);
  return num / ((b1 - a1) * (b2 - a2));
}

double hinge_exact(const ChannelParams& params, double t, int p) {
  const auto [a1, b1] = params.fwd.box();
  const auto [a2, b2] = params.bwd.box();
  const bool point1 = !(b1 > a1), point2 = !(b2 > a2);
  if (point1 && point2) return std::pow(pos(a1 + a2 - t), p);
  if (point1) return hinge_uniform(a2 + a1, b2 + a1, t, p);
  if (point2) return hinge_uniform(a1 + a2, b1 + a2, t, p);
  return hinge_uniform_sum(a1, b1, a2, b2, t, p);
}

} // namespace

GbarEstimate estimate_gbar(double gamma, double nu, const DelayPool& pool) {
  MeanAcc acc;
  for (std::size_t i = 0; i < pool.size(); ++i) acc.add(eval_g(gamma, nu, pool.d_a[i], pool.d_v[i]));
  return {acc.mean, acc.std_error()};
}

GbarEstimate estimate_gbar(double gamma, double nu, const ChannelParams& params, std::size_t n,
                           std::uint64_t crn_seed) {
  return estimate_gbar(gamma, nu, draw_delay_pool(params, n, crn_seed));
}

ThresholdExpectations threshold_expectations_exact(const ChannelParams& params, double theta) {
  if (!params.fwd.is_box() || !params.bwd.is_box())
    throw InvalidParameter("closed-form threshold expectations need deterministic or uniform delays");
  const double h1 = hinge_exact(params, theta, 1);
  const double h2 = hinge_exact(params, theta, 2);
  return {theta + h1, theta * theta + 2.0 * theta * h1 + h2};
}

ThresholdModel::ThresholdModel(const ChannelParams& params, const OracleOptions& opts)
    : params_(params), moments_(analytic_moments(params)) {
  exact_ = opts.prefer_exact && params.fwd.is_box() && params.bwd.is_box();
  if (!exact_) {
    if (opts.n < 1000) throw InvalidParameter("Monte-Carlo oracle needs n >= 1000");
    pool_ = draw_delay_pool(params, opts.n, opts.crn_seed);
  }
}

ThresholdExpectations ThresholdModel::expectations(double theta) const {
  if (exact_) return threshold_expectations_exact(params_, theta);
  // Control variates: E[max{X,t}] = E[X] + E[(t-X)^+], same for squares.
  double s1 = 0.0, s2 = 0.0;
  const double t2 = theta * theta;
  for (const double x : pool_.d_a) {
    if (x < theta) {
      s1 += theta - x;
      s2 += t2 - x * x;
    }
  }
  const double n = static_cast<double>(pool_.size());
  return {moments_.mean_Da + s1 / n, moments_.m2_Da + s2 / n};
}

double ThresholdModel::mean_length(double theta) const { return expectations(theta).e_max + moments_.mean_Dv; }

double ThresholdModel::stationarity(double gamma, double nu) const {
  const auto e = expectations(gamma + nu);
  return 0.5 * e.e_max2 - gamma * (e.e_max + moments_.mean_Dv) + moments_.n_const();
}

double ThresholdModel::aoi(double theta) const {
  const auto e = expectations(theta);
  return moments_.mean_DF + moments_.mean_Dv + (0.5 * e.e_max2 + moments_.n_const()) / (e.e_max + moments_.mean_Dv);
}

double ThresholdModel::stationarity_std_error(double gamma, double theta) const {
  if (exact_) return 0.0;
  MeanAcc acc;
  const double t2 = theta * theta;
  for (const double x : pool_.d_a) {
    const double below = x < theta ? 1.0 : 0.0;
    acc.add(below * (0.5 * (t2 - x * x) - gamma * (theta - x)));
  }
  return acc.std_error();
}

namespace {

// Finds the root of a decreasing function on [lo, inf) by doubling then bisection.
template <typename F>
double bisect_decreasing(F f, double lo, double hi_start, double tol) {
  const double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  if (f_lo < 0.0) throw NoSignChange("target is already negative at the lower end of the bracket");
  double hi = std::max(hi_start, lo + tol);
  int doublings = 0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) throw NoSignChange("no sign change found while expanding the bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (v == 0.0) return mid;
    (v > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OracleSolution fill_solution(const ThresholdModel& model, double gamma, double theta, const char* method) {
  OracleSolution s;
  s.gamma_star = gamma;
  s.theta_star = theta;
  s.nu_star = std::max(theta - gamma, 0.0);
  s.L_star = model.mean_length(theta);
  s.aoi_opt = gamma + model.moments().mean_DF + model.moments().mean_Dv;
  s.n_samples = model.n_samples();
  s.aoi_std_error = model.stationarity_std_error(gamma, theta) / s.L_star;
  s.ci_halfwidth = 1.96 * s.aoi_std_error;
  s.method = model.exact() ? "exact" : "monte_carlo";
  s.method += method;
  return s;
}

OracleSolution solve_unconstrained(const ThresholdModel& model, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("oracle tolerance must be > 0");
  const double hi0 = std::max(1.0, model.moments().mean_Da);
  const double root = bisect_decreasing([&](double g) { return model.stationarity(g, 0.0); }, 0.0, hi0, tol);
  return fill_solution(model, root, root, "+bisection");
}

} // namespace

OracleSolution solve_unconstrained(const ChannelParams& params, const OracleOptions& opts) {
  const ThresholdModel model(params, opts);
  return solve_unconstrained(model, opts.tol);
}

OracleSolution solve_constrained(const ChannelParams& params, FrequencyCap f_max, const OracleOptions& opts) {
  const ThresholdModel model(params, opts);
  OracleSolution free = solve_unconstrained(model, opts.tol);
  if (!f_max.bounded()) return free;
  const double target = model.moments().mean_M * f_max.min_interval();
  if (free.L_star >= target) return free;

  // Binding constraint: theta solves E[max{D_a,theta}] + E[D_v] = E[M]/f_max
  // (increasing in theta), and stationarity is linear in gamma at fixed theta.
  const double theta = bisect_decreasing([&](double t) { return target - model.mean_length(t); },
                                         free.theta_star, std::max(2.0 * free.theta_star, target),
                                         opts.tol * 1e-2);
  const auto e = model.expectations(theta);
  const double length = e.e_max + model.moments().mean_Dv;
  const double gamma = (0.5 * e.e_max2 + model.moments().n_const()) / length;
  return fill_solution(model, gamma, theta, "+binding");
}

GridResult grid_bruteforce(const ChannelParams& params, FrequencyCap f_max, std::span<const double> theta_grid,
                           std::size_t n, std::uint64_t seed) {
  if (theta_grid.empty()) throw InvalidParameter("grid_bruteforce: empty grid");
  if (n < 1000) throw InvalidParameter("grid_bruteforce: n must be >= 1000");
  // n + 1 epochs: the first only supplies L_0 for the first reward.
  const DelayPool pool = draw_delay_pool(params, n + 1, seed);

  double sum_df = 0.0, sum_dv = 0.0, sum_m = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sum_df += pool.d_f[i];
    sum_dv += pool.d_v[i];
    sum_m += pool.M[i];
  }
  const double nn = static_cast<double>(n);

  GridResult out;
  out.points.reserve(theta_grid.size());
  std::vector<double> fk(n), lk(n);
  for (const double theta : theta_grid) {
    double l_prev = std::max(pool.d_a[0], theta) + pool.d_v[0];
    double sum_f = 0.0, sum_l = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double l = std::max(pool.d_a[i], theta) + pool.d_v[i];
      const double f = pool.d_f[i] * l_prev + 0.5 * l * l;
      fk[i - 1] = f;
      lk[i - 1] = l;
      sum_f += f;
      sum_l += l;
      l_prev = l;
    }
    const double ratio = sum_f / sum_l;
    // Delta-method error of the ratio estimator; F_k shares L_{k-1} with
    // F_{k-1}, so the lag-1 autocovariance is included.
    double c0 = 0.0, c1 = 0.0, r_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = fk[i] - ratio * lk[i];
      c0 += r * r;
      if (i > 0) c1 += r * r_prev;
      r_prev = r;
    }
    const double var = std::max((c0 + 2.0 * c1) / nn, 0.0);
    GridPoint p;
    p.theta = theta;
    p.aoi = ratio;
    p.std_error = std::sqrt(var / nn) / (sum_l / nn);
    p.mean_interval = sum_l / sum_m;
    out.points.push_back(p);
  }

  const double min_interval = f_max.min_interval();
  const GridPoint* best = nullptr;
  for (const auto& p : out.points) {
    if (p.mean_interval < min_interval) continue;
    if (!best || p.aoi < best->aoi) best = &p;
  }
  if (!best) throw InvalidParameter("grid_bruteforce: no grid threshold satisfies the frequency cap");

  OracleSolution& s = out.best;
  s.theta_star = best->theta;
  s.aoi_opt = best->aoi;
  s.aoi_std_error = best->std_error;
  s.gamma_star = best->aoi - sum_df / nn - sum_dv / nn;
  s.nu_star = std::max(s.theta_star - s.gamma_star, 0.0);
  if (!f_max.bounded()) s.nu_star = 0.0;
  s.L_star = best->mean_interval * (sum_m / nn);
  s.n_samples = n;
  s.ci_halfwidth = 1.96 * best->std_error;
  s.method = "grid";
  return out;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw InvalidParameter("make_grid: need step > 0 and hi >= lo");
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  g.reserve(count);
  for (std::size_t i = 0; i < count; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

} // namespace aoi
