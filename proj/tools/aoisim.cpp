// Command-line front end: simulate, oracle, ensemble, fit, compare.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoi/analysis.hpp"
#include "aoi/config.hpp"
#include "aoi/csv.hpp"
#include "aoi/errors.hpp"
#include "aoi/oracle.hpp"
#include "aoi/simulator.hpp"
#include "aoi/svg.hpp"

namespace {

using nlohmann::json;

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw aoi::Error("cannot open '" + path + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw aoi::Error("failed writing '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aoi::Error("cannot open '" + path + "'");
  return in;
}

aoi::OracleSolution oracle_for(const aoi::ExperimentConfig& cfg) {
  return aoi::solve_constrained(cfg.run.channel, cfg.run.f_max, cfg.oracle);
}

void write_svgs(const std::string& prefix, const aoi::RunResult& res) {
  aoi::svg::Series gamma{"gamma_k", {}, {}}, threshold{"gamma_k + nu_k", {}, {}};
  aoi::svg::Series aoi_s{"time-average AoI", {}, {}};
  aoi::svg::Series regret_s{"regret / ln k", {}, {}};
  for (const auto& r : res.records) {
    const double k = static_cast<double>(r.k);
    gamma.x.push_back(k);
    gamma.y.push_back(r.gamma);
    threshold.x.push_back(k);
    threshold.y.push_back(r.gamma + r.nu);
    aoi_s.x.push_back(k);
    aoi_s.y.push_back(r.time_avg_aoi);
    if (r.k >= 2) {
      regret_s.x.push_back(k);
      regret_s.y.push_back(r.regret / std::log(k));
    }
  }
  write_file(prefix + "_gamma.svg", [&](std::ostream& os) {
    os << aoi::svg::line_chart({gamma, threshold}, {"Threshold trace", "epoch k", "time units", true});
  });
  write_file(prefix + "_aoi.svg", [&](std::ostream& os) {
    os << aoi::svg::line_chart({aoi_s}, {"Time-average AoI", "epoch k", "AoI", true});
  });
  if (!regret_s.x.empty())
    write_file(prefix + "_regret.svg", [&](std::ostream& os) {
      os << aoi::svg::line_chart({regret_s}, {"Regret over ln k", "epoch k", "regret / ln k", true});
    });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information sampling: simulation, online learning, and oracle tools"};
  app.require_subcommand(1);

  std::string config_path, out_path, seeds_out, svg_prefix, format = "json", quantity, variant;
  std::string table_a, table_b, variant_a, variant_b;
  bool with_oracle = false, no_oracle = false;
  double grid_step = 0.0, grid_max = 0.0;

  auto* sim = app.add_subcommand("simulate", "Run one simulation and print its summary");
  sim->add_option("config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "Write the per-epoch trace CSV here");
  sim->add_option("--svg", svg_prefix, "Write <prefix>_gamma.svg, _aoi.svg, _regret.svg");
  sim->add_flag("--with-oracle", with_oracle, "Solve the oracle and report regret against it");

  auto* ora = app.add_subcommand("oracle", "Solve for the optimal threshold from channel statistics");
  ora->add_option("config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
  ora->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  ora->add_option("--out", out_path, "Write the record here instead of stdout");
  ora->add_option("--grid-step", grid_step, "Also run the grid brute force with this step");
  ora->add_option("--grid-max", grid_max, "Upper end of the brute-force grid (default 3 theta*)");

  auto* ens = app.add_subcommand("ensemble", "Run the seeded ensemble described in the config");
  ens->add_option("config", config_path, "JSON run config with an 'ensemble' block")->required()->check(CLI::ExistingFile);
  ens->add_option("--out", out_path, "Summary table CSV (default: stdout)");
  ens->add_option("--seeds-out", seeds_out, "Per-seed table CSV");
  ens->add_flag("--no-oracle", no_oracle, "Skip the oracle; squared-error and regret columns become nan");

  auto* fit = app.add_subcommand("fit", "Fit an error-decay or regret law to an ensemble table");
  fit->add_option("table", table_a, "Summary or per-seed ensemble CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--quantity", quantity, "mse_gamma or regret_over_lnK")->required();
  fit->add_option("--variant", variant, "Variant to fit (default: the first in the table)");

  auto* cmp = app.add_subcommand("compare", "Paired variance comparison of two per-seed tables");
  cmp->add_option("a", table_a, "Baseline per-seed CSV (e.g. vanilla)")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", table_b, "Candidate per-seed CSV (e.g. momentum)")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", out_path, "Comparison CSV (default: stdout)");
  cmp->add_option("--variant-a", variant_a, "Keep only this variant from table a");
  cmp->add_option("--variant-b", variant_b, "Keep only this variant from table b");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const aoi::ExperimentConfig cfg = aoi::load_config(config_path);
      aoi::RunConfig run = cfg.run;
      std::optional<aoi::OracleSolution> oracle;
      if (with_oracle) {
        oracle = oracle_for(cfg);
        run.aoi_reference = oracle->aoi_opt;
      }
      const aoi::RunResult res = aoi::run(run);
      if (!out_path.empty()) write_file(out_path, [&](std::ostream& os) { aoi::csv::write_trace(os, res.records); });
      if (!svg_prefix.empty()) write_svgs(svg_prefix, res);
      json j = aoi::to_json(res.summary);
      j["policy"] = run.policy.name();
      if (oracle) j["oracle"] = aoi::to_json(*oracle);
      std::cout << j.dump(2) << "\n";
    } else if (*ora) {
      const aoi::ExperimentConfig cfg = aoi::load_config(config_path);
      const aoi::OracleSolution s = oracle_for(cfg);
      json j = aoi::to_json(s);
      std::optional<aoi::GridResult> grid;
      if (grid_step > 0.0) {
        const double hi = grid_max > 0.0 ? grid_max : 3.0 * std::max(s.theta_star, 1.0);
        const auto thetas = aoi::make_grid(0.0, hi, grid_step);
        grid = aoi::grid_bruteforce(cfg.run.channel, cfg.run.f_max, thetas, cfg.oracle.n, cfg.oracle.crn_seed + 1);
        j["grid"] = aoi::to_json(grid->best);
      }
      auto emit = [&](std::ostream& os) {
        if (format == "csv") {
          aoi::csv::write_oracle(os, s);
          if (grid) aoi::csv::write_oracle(os, grid->best);
        } else {
          os << j.dump(2) << "\n";
        }
      };
      if (out_path.empty())
        emit(std::cout);
      else
        write_file(out_path, emit);
    } else if (*ens) {
      const aoi::ExperimentConfig cfg = aoi::load_config(config_path);
      aoi::EnsembleSpec spec = cfg.ensemble();
      if (!no_oracle) spec.oracle = oracle_for(cfg);
      const aoi::EnsembleTable table = aoi::run_ensemble(spec);
      if (!seeds_out.empty())
        write_file(seeds_out, [&](std::ostream& os) { aoi::csv::write_seed_rows(os, table.per_seed); });
      if (out_path.empty())
        aoi::csv::write_summary_rows(std::cout, table.summary);
      else
        write_file(out_path, [&](std::ostream& os) { aoi::csv::write_summary_rows(os, table.summary); });
    } else if (*fit) {
      std::ifstream in = open_input(table_a);
      const std::string schema = aoi::csv::peek_schema(in);
      std::vector<aoi::SummaryRow> rows = schema == aoi::csv::kSeedSchema
                                              ? aoi::aggregate(aoi::csv::read_seed_rows(in))
                                              : aoi::csv::read_summary_rows(in);
      if (rows.empty()) throw aoi::Error("fit: table has no rows");
      const std::string want = variant.empty() ? rows.front().variant : variant;
      std::erase_if(rows, [&](const aoi::SummaryRow& r) { return r.variant != want; });
      const aoi::FitReport f = aoi::fit_error_decay(rows, aoi::parse_fit_quantity(quantity));
      std::cout << json{{"variant", want},   {"quantity", quantity}, {"slope", f.slope},
                        {"intercept", f.intercept}, {"r2", f.r2},   {"n_points", f.n_points}}
                       .dump(2)
                << "\n";
    } else if (*cmp) {
      std::ifstream ia = open_input(table_a), ib = open_input(table_b);
      auto pick = [](std::vector<aoi::SeedRow> rows, const std::string& v) {
        if (!v.empty()) std::erase_if(rows, [&](const aoi::SeedRow& r) { return r.variant != v; });
        if (rows.empty()) throw aoi::Error("compare: no rows for variant '" + v + "'");
        return rows;
      };
      const auto rows = aoi::compare_variance(pick(aoi::csv::read_seed_rows(ia), variant_a),
                                              pick(aoi::csv::read_seed_rows(ib), variant_b));
      if (out_path.empty())
        aoi::csv::write_compare_rows(std::cout, rows);
      else
        write_file(out_path, [&](std::ostream& os) { aoi::csv::write_compare_rows(os, rows); });
    }
  } catch (const std::exception& e) {
    std::cerr << "aoisim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
