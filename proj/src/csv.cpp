#include "aoi/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "aoi/errors.hpp"

namespace aoi::csv {

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

double to_double(const std::string& s) {
  if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw InvalidParameter("csv: bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw InvalidParameter("csv: bad integer '" + s + "'");
  return v;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::optional<double> to_opt(const std::string& s) {
  if (s == "NA") return std::nullopt;
  return to_double(s);
}

Table expect(std::istream& is, const char* schema) {
  Table t = read_table(is);
  if (t.schema != schema) throw InvalidParameter("csv: expected schema '" + std::string(schema) + "', found '" + t.schema + "'");
  if (t.version != kVersion) throw InvalidParameter("csv: unsupported schema version");
  return t;
}

} // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InvalidParameter("csv: missing column '" + name + "'");
}

void write_table(std::ostream& os, const Table& t) {
  os << "# " << t.schema << " v" << t.version << "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << quote(t.header[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << quote(row[i]);
    os << "\n";
  }
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw InvalidParameter("csv: missing schema comment line");
  {
    std::istringstream ss(line.substr(2));
    std::string ver;
    ss >> t.schema >> ver;
    if (ver.size() < 2 || ver[0] != 'v') throw InvalidParameter("csv: malformed schema line");
    t.version = static_cast<int>(to_u64(ver.substr(1)));
  }
  if (!std::getline(is, line)) throw InvalidParameter("csv: missing header row");
  t.header = split_row(line);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_row(line);
    if (cells.size() != t.header.size()) throw InvalidParameter("csv: row width does not match header");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string peek_schema(std::istream& is) {
  const auto pos = is.tellg();
  std::string line;
  std::getline(is, line);
  is.clear();
  is.seekg(pos);
  if (line.rfind("# ", 0) != 0) return {};
  std::istringstream ss(line.substr(2));
  std::string schema;
  ss >> schema;
  return schema;
}

void write_trace(std::ostream& os, const std::vector<EpochRecord>& records) {
  Table t{kTraceSchema, kVersion,
          {"k", "gamma", "nu", "U", "M", "D_a", "D_v", "W", "L", "F", "S_next", "cum_aoi", "regret",
           "time_avg_aoi", "mean_interval", "samples"},
          {}};
  for (const auto& r : records) {
    t.rows.push_back({std::to_string(r.k), format_double(r.gamma), format_double(r.nu), format_double(r.U),
                      std::to_string(r.M), format_double(r.D_a), format_double(r.D_v), format_double(r.W),
                      format_double(r.L), format_double(r.F), format_double(r.S_next), format_double(r.cum_aoi),
                      format_double(r.regret), format_double(r.time_avg_aoi), format_double(r.mean_interval),
                      std::to_string(r.samples)});
  }
  write_table(os, t);
}

std::vector<EpochRecord> read_trace(std::istream& is) {
  const Table t = expect(is, kTraceSchema);
  const auto c = [&](const char* n) { return t.column(n); };
  const std::size_t ck = c("k"), cg = c("gamma"), cn = c("nu"), cu = c("U"), cm = c("M"), ca = c("D_a"),
                    cv = c("D_v"), cw = c("W"), cl = c("L"), cf = c("F"), cs = c("S_next"), cc = c("cum_aoi"),
                    cr = c("regret"), ct = c("time_avg_aoi"), ci = c("mean_interval"), cx = c("samples");
  std::vector<EpochRecord> out;
  for (const auto& row : t.rows) {
    EpochRecord r;
    r.k = to_u64(row[ck]);
    r.gamma = to_double(row[cg]);
    r.nu = to_double(row[cn]);
    r.U = to_double(row[cu]);
    r.M = static_cast<std::uint32_t>(to_u64(row[cm]));
    r.D_a = to_double(row[ca]);
    r.D_v = to_double(row[cv]);
    r.W = to_double(row[cw]);
    r.L = to_double(row[cl]);
    r.F = to_double(row[cf]);
    r.S_next = to_double(row[cs]);
    r.cum_aoi = to_double(row[cc]);
    r.regret = to_double(row[cr]);
    r.time_avg_aoi = to_double(row[ct]);
    r.mean_interval = to_double(row[ci]);
    r.samples = to_u64(row[cx]);
    out.push_back(r);
  }
  return out;
}

void write_seed_rows(std::ostream& os, const std::vector<SeedRow>& rows) {
  Table t{kSeedSchema, kVersion, {"variant", "seed", "K", "aoi", "gamma", "sq_err", "regret", "interval", "channel"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.variant, std::to_string(r.seed), std::to_string(r.K), format_double(r.aoi),
                      format_double(r.gamma), format_double(r.sq_err), format_double(r.regret),
                      format_double(r.interval), r.channel});
  write_table(os, t);
}

std::vector<SeedRow> read_seed_rows(std::istream& is) {
  const Table t = expect(is, kSeedSchema);
  const std::size_t cv = t.column("variant"), cs = t.column("seed"), ck = t.column("K"), ca = t.column("aoi"),
                    cg = t.column("gamma"), ce = t.column("sq_err"), cr = t.column("regret"),
                    ci = t.column("interval"), cc = t.column("channel");
  std::vector<SeedRow> out;
  for (const auto& row : t.rows) {
    SeedRow r;
    r.variant = row[cv];
    r.seed = to_u64(row[cs]);
    r.K = to_u64(row[ck]);
    r.aoi = to_double(row[ca]);
    r.gamma = to_double(row[cg]);
    r.sq_err = to_double(row[ce]);
    r.regret = to_double(row[cr]);
    r.interval = to_double(row[ci]);
    r.channel = row[cc];
    out.push_back(r);
  }
  return out;
}

void write_summary_rows(std::ostream& os, const std::vector<SummaryRow>& rows) {
  Table t{kSummarySchema, kVersion,
          {"variant", "K", "n", "aoi_mean", "aoi_std", "gamma_mean", "gamma_std", "sq_err_mean", "sq_err_std",
           "regret_mean", "regret_std", "interval_mean", "interval_std"},
          {}};
  for (const auto& r : rows)
    t.rows.push_back({r.variant, std::to_string(r.K), std::to_string(r.n), format_double(r.aoi_mean),
                      format_double(r.aoi_std), format_double(r.gamma_mean), format_double(r.gamma_std),
                      format_double(r.sq_err_mean), format_double(r.sq_err_std), format_double(r.regret_mean),
                      format_double(r.regret_std), format_double(r.interval_mean), format_double(r.interval_std)});
  write_table(os, t);
}

std::vector<SummaryRow> read_summary_rows(std::istream& is) {
  const Table t = expect(is, kSummarySchema);
  std::vector<SummaryRow> out;
  const auto d = [&](const std::vector<std::string>& row, const char* n) { return to_double(row[t.column(n)]); };
  for (const auto& row : t.rows) {
    SummaryRow r;
    r.variant = row[t.column("variant")];
    r.K = to_u64(row[t.column("K")]);
    r.n = to_u64(row[t.column("n")]);
    r.aoi_mean = d(row, "aoi_mean");
    r.aoi_std = d(row, "aoi_std");
    r.gamma_mean = d(row, "gamma_mean");
    r.gamma_std = d(row, "gamma_std");
    r.sq_err_mean = d(row, "sq_err_mean");
    r.sq_err_std = d(row, "sq_err_std");
    r.regret_mean = d(row, "regret_mean");
    r.regret_std = d(row, "regret_std");
    r.interval_mean = d(row, "interval_mean");
    r.interval_std = d(row, "interval_std");
    out.push_back(r);
  }
  return out;
}

void write_compare_rows(std::ostream& os, const std::vector<CompareRow>& rows) {
  Table t{kCompareSchema, kVersion, {"K", "n", "std_a", "std_b", "mse_a", "mse_b", "std_ratio", "mse_ratio"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.K), std::to_string(r.n), format_double(r.std_a), format_double(r.std_b),
                      format_double(r.mse_a), format_double(r.mse_b), fmt_opt(r.std_ratio), fmt_opt(r.mse_ratio)});
  write_table(os, t);
}

std::vector<CompareRow> read_compare_rows(std::istream& is) {
  const Table t = expect(is, kCompareSchema);
  std::vector<CompareRow> out;
  for (const auto& row : t.rows) {
    CompareRow r;
    r.K = to_u64(row[t.column("K")]);
    r.n = to_u64(row[t.column("n")]);
    r.std_a = to_double(row[t.column("std_a")]);
    r.std_b = to_double(row[t.column("std_b")]);
    r.mse_a = to_double(row[t.column("mse_a")]);
    r.mse_b = to_double(row[t.column("mse_b")]);
    r.std_ratio = to_opt(row[t.column("std_ratio")]);
    r.mse_ratio = to_opt(row[t.column("mse_ratio")]);
    out.push_back(r);
  }
  return out;
}

void write_oracle(std::ostream& os, const OracleSolution& s) {
  Table t{kOracleSchema, kVersion,
          {"gamma_star", "nu_star", "theta_star", "aoi_opt", "L_star", "n_samples", "ci_halfwidth", "aoi_std_error",
           "method"},
          {}};
  t.rows.push_back({format_double(s.gamma_star), format_double(s.nu_star), format_double(s.theta_star),
                    format_double(s.aoi_opt), format_double(s.L_star), std::to_string(s.n_samples),
                    format_double(s.ci_halfwidth), format_double(s.aoi_std_error), s.method});
  write_table(os, t);
}

OracleSolution read_oracle(std::istream& is) {
  const Table t = expect(is, kOracleSchema);
  if (t.rows.size() != 1) throw InvalidParameter("csv: oracle table must hold exactly one row");
  const auto& row = t.rows.front();
  OracleSolution s;
  s.gamma_star = to_double(row[t.column("gamma_star")]);
  s.nu_star = to_double(row[t.column("nu_star")]);
  s.theta_star = to_double(row[t.column("theta_star")]);
  s.aoi_opt = to_double(row[t.column("aoi_opt")]);
  s.L_star = to_double(row[t.column("L_star")]);
  s.n_samples = to_u64(row[t.column("n_samples")]);
  s.ci_halfwidth = to_double(row[t.column("ci_halfwidth")]);
  s.aoi_std_error = to_double(row[t.column("aoi_std_error")]);
  s.method = row[t.column("method")];
  return s;
}

} // namespace aoi::csv
