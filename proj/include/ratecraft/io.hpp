#pragma once

// File formats: design and H files (JSON), question banks, ratings,
// qualities and simulation output (CSV, header row mandatory, LF endings).

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ratecraft/core.hpp"
#include "ratecraft/psi.hpp"
#include "ratecraft/simulator.hpp"

namespace ratecraft::io {

/// Shortest round-trip decimal form.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row i is file line i + 2
};

/// Parses CSV text; fields may be double-quoted. Every row must have as many
/// fields as the header.
CsvTable parse_csv(std::istream& in, const std::string& source = "<csv>");
CsvTable read_csv_file(const std::string& path);

/// Column lookup with a schema error naming the file when it is missing.
std::size_t column(const CsvTable& table, const std::string& name, const std::string& source);

double parse_double_field(const std::string& text, std::size_t row, const std::string& field);
long long parse_int_field(const std::string& text, std::size_t row, const std::string& field);

struct DesignFile {
  StepBeta beta;
  MatchProfile g;
  WeightKind w = WeightKind::kendall;
  std::optional<double> rate;  // absent for the degenerate M = 2 design
  std::optional<double> residual;
};

std::string design_to_json(const DesignFile& design);
DesignFile design_from_json(const std::string& text);
void write_design(const std::string& path, const DesignFile& design);
DesignFile read_design(const std::string& path);

std::string distribution_to_json(const QuestionDistribution& h);
QuestionDistribution distribution_from_json(const std::string& text);
void write_distribution(const std::string& path, const QuestionDistribution& h);
QuestionDistribution read_distribution(const std::string& path);

/// True when the JSON file holds an H file rather than a design file.
bool is_distribution_file(const std::string& path);

/// `theta,question,psi` or `theta,question,positives,total`. Questions keep
/// their order of first appearance.
QuestionBank bank_from_csv(const CsvTable& table, const std::string& source = "<bank>");
QuestionBank read_bank(const std::string& path);
void write_bank(std::ostream& out, const QuestionBank& bank);
void write_bank(const std::string& path, const QuestionBank& bank);

/// `item_id,question,response`.
std::vector<Rating> read_ratings(const std::string& path);
std::vector<Rating> ratings_from_csv(const CsvTable& table, const std::string& source);

/// `item_id,theta`.
std::map<std::string, double> read_qualities(const std::string& path);

/// `replicate,k,metric,value`.
void write_series(std::ostream& out, const SimResult& result);
/// `k,metric,mean,std_error,replicates`.
void write_summary(std::ostream& out, const SimResult& result);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace ratecraft::io
