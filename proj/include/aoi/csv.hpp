#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aoi/analysis.hpp"
#include "aoi/oracle.hpp"
#include "aoi/simulator.hpp"

/// CSV tables. Every file starts with a "# <schema> v<version>" comment line
/// followed by a header row; numbers are written with 17 significant digits
/// so a read after a write returns identical doubles.
namespace aoi::csv {

inline constexpr const char* kTraceSchema = "aoi-trace";
inline constexpr const char* kSeedSchema = "aoi-ensemble-seeds";
inline constexpr const char* kSummarySchema = "aoi-ensemble-summary";
inline constexpr const char* kCompareSchema = "aoi-compare";
inline constexpr const char* kOracleSchema = "aoi-oracle";
inline constexpr int kVersion = 1;

/// Raw table: header names and string cells.
struct Table {
  std::string schema;
  int version = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

void write_table(std::ostream& os, const Table& table);
Table read_table(std::istream& is);

/// Name of the schema in the leading comment line.
std::string peek_schema(std::istream& is);

void write_trace(std::ostream& os, const std::vector<EpochRecord>& records);
std::vector<EpochRecord> read_trace(std::istream& is);

void write_seed_rows(std::ostream& os, const std::vector<SeedRow>& rows);
std::vector<SeedRow> read_seed_rows(std::istream& is);

void write_summary_rows(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_rows(std::istream& is);

void write_compare_rows(std::ostream& os, const std::vector<CompareRow>& rows);
std::vector<CompareRow> read_compare_rows(std::istream& is);

void write_oracle(std::ostream& os, const OracleSolution& solution);
OracleSolution read_oracle(std::istream& is);

std::string format_double(double v);

} // namespace aoi::csv
