#include "ratecraft/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ratecraft::io {

using nlohmann::json;

namespace {

std::string schema_error(const std::string& source, std::size_t row, const std::string& field,
                         const std::string& why) {
  std::ostringstream out;
  out << source << ": row " << row << ", field '" << field << "': " << why;
  return out.str();
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no,
                                    const std::string& source) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) {
    throw ValidationError(source + ": line " + std::to_string(line_no) + " has an unterminated quote");
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

json number_or_null(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type: " + e.what());
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto fields = split_line(line, line_no, source);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      std::ostringstream out;
      out << source << ": row " << table.rows.size() + 1 << " has " << fields.size()
          << " fields, header has " << table.header.size();
      throw ValidationError(out.str());
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ValidationError(source + ": missing header row");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  return parse_csv(in, path);
}

std::size_t column(const CsvTable& table, const std::string& name, const std::string& source) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw ValidationError(source + ": missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_double_field(const std::string& text, std::size_t row, const std::string& field) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) {
    throw ValidationError(schema_error("csv", row, field, "'" + text + "' is not a number"));
  }
  return v;
}

long long parse_int_field(const std::string& text, std::size_t row, const std::string& field) {
  long long v = 0;
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, v);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) {
    throw ValidationError(schema_error("csv", row, field, "'" + text + "' is not an integer"));
  }
  return v;
}

// ------------------------------------------------------------------ design

std::string design_to_json(const DesignFile& design) {
  json j;
  j["M"] = design.beta.size();
  j["s"] = design.beta.breakpoints();
  j["t"] = design.beta.levels();
  j["g"] = {{"kind", std::string(to_string(design.g.kind()))}, {"values", design.g.values()}};
  j["w"] = {{"kind", std::string(to_string(design.w))}};
  j["rate"] = number_or_null(design.rate);
  if (design.residual) j["residual"] = number_or_null(design.residual);
  return j.dump(2) + "\n";
}

DesignFile design_from_json(const std::string& text) {
  const json j = parse_json(text);
  const auto m = get_field<std::size_t>(j, "M");
  auto s = get_field<std::vector<double>>(j, "s");
  auto t = get_field<std::vector<double>>(j, "t");
  if (t.size() != m) throw ValidationError("design: M does not match the number of levels");
  StepBeta beta(std::move(s), std::move(t));

  const json& gj = j.contains("g") ? j.at("g") : json::object();
  const auto g_kind = parse_match_kind(gj.contains("kind") ? gj.at("kind").get<std::string>() : "uniform");
  std::vector<double> values;
  if (gj.contains("values")) values = gj.at("values").get<std::vector<double>>();
  MatchProfile g = values.empty() ? make_match_profile(g_kind, beta.breakpoints())
                                  : MatchProfile::table(values);
  if (!values.empty() && g_kind != MatchKind::table) {
    // Keep the declared kind when the stored values agree with it.
    const auto rebuilt = make_match_profile(g_kind, beta.breakpoints());
    if (rebuilt.values() == values) g = rebuilt;
  }
  if (g.size() != m) throw ValidationError("design: match profile length does not match M");

  WeightKind w = WeightKind::kendall;
  if (j.contains("w") && j.at("w").contains("kind")) {
    w = parse_weight_kind(j.at("w").at("kind").get<std::string>());
  }
  std::optional<double> rate;
  if (j.contains("rate") && j.at("rate").is_number()) rate = j.at("rate").get<double>();
  std::optional<double> residual;
  if (j.contains("residual") && j.at("residual").is_number()) {
    residual = j.at("residual").get<double>();
  }
  return DesignFile{std::move(beta), std::move(g), w, rate, residual};
}

void write_design(const std::string& path, const DesignFile& design) {
  write_text(path, design_to_json(design));
}

DesignFile read_design(const std::string& path) {
  try {
    return design_from_json(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// ------------------------------------------------------------ distribution

std::string distribution_to_json(const QuestionDistribution& h) {
  json j;
  j["questions"] = h.questions;
  j["probabilities"] = h.probabilities;
  j["objective"] = h.objective;
  return j.dump(2) + "\n";
}

QuestionDistribution distribution_from_json(const std::string& text) {
  const json j = parse_json(text);
  QuestionDistribution h;
  h.questions = get_field<std::vector<std::string>>(j, "questions");
  h.probabilities = get_field<std::vector<double>>(j, "probabilities");
  if (j.contains("objective") && j.at("objective").is_number()) {
    h.objective = j.at("objective").get<double>();
  }
  validate_distribution(h);
  return h;
}

void write_distribution(const std::string& path, const QuestionDistribution& h) {
  write_text(path, distribution_to_json(h));
}

QuestionDistribution read_distribution(const std::string& path) {
  try {
    return distribution_from_json(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

bool is_distribution_file(const std::string& path) {
  const json j = parse_json(read_text(path));
  return j.is_object() && j.contains("questions");
}

// -------------------------------------------------------------------- bank

QuestionBank bank_from_csv(const CsvTable& table, const std::string& source) {
  const std::size_t theta_col = column(table, "theta", source);
  const std::size_t question_col = column(table, "question", source);
  const bool with_counts = std::find(table.header.begin(), table.header.end(), "positives") !=
                           table.header.end();
  const std::size_t psi_col = with_counts ? 0 : column(table, "psi", source);
  const std::size_t pos_col = with_counts ? column(table, "positives", source) : 0;
  const std::size_t tot_col = with_counts ? column(table, "total", source) : 0;

  std::vector<std::string> questions;
  std::set<double> thetas;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    thetas.insert(parse_double_field(table.rows[r][theta_col], r + 1, "theta"));
    const auto& q = table.rows[r][question_col];
    if (std::find(questions.begin(), questions.end(), q) == questions.end()) questions.push_back(q);
  }
  std::vector<double> qualities(thetas.begin(), thetas.end());
  const std::size_t cols = questions.size();
  const std::size_t cells = qualities.size() * cols;
  std::vector<double> psi(cells, 0.0);
  std::vector<long long> pos(cells, 0), tot(cells, 0);
  std::vector<bool> seen(cells, false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const double theta = parse_double_field(row[theta_col], r + 1, "theta");
    const auto i = static_cast<std::size_t>(
        std::lower_bound(qualities.begin(), qualities.end(), theta) - qualities.begin());
    const auto y = static_cast<std::size_t>(
        std::find(questions.begin(), questions.end(), row[question_col]) - questions.begin());
    const std::size_t k = i * cols + y;
    if (seen[k]) {
      throw ValidationError(schema_error(source, r + 1, "question", "duplicate (theta, question) cell"));
    }
    seen[k] = true;
    if (with_counts) {
      pos[k] = parse_int_field(row[pos_col], r + 1, "positives");
      tot[k] = parse_int_field(row[tot_col], r + 1, "total");
      if (tot[k] <= 0 || pos[k] < 0 || pos[k] > tot[k]) {
        throw ValidationError(schema_error(source, r + 1, "total", "need 0 <= positives <= total, total > 0"));
      }
    } else {
      psi[k] = parse_double_field(row[psi_col], r + 1, "psi");
      if (!(psi[k] >= 0.0 && psi[k] <= 1.0)) {
        throw ValidationError(schema_error(source, r + 1, "psi", "must lie in [0,1]"));
      }
    }
  }
  for (std::size_t k = 0; k < cells; ++k) {
    if (!seen[k]) {
      throw ValidationError(source + ": missing cell theta=" + format_double(qualities[k / cols]) +
                            ", question '" + questions[k % cols] + "'");
    }
  }
  if (with_counts) {
    return QuestionBank::from_counts(std::move(qualities), std::move(questions), std::move(pos),
                                     std::move(tot));
  }
  return QuestionBank(std::move(qualities), std::move(questions), std::move(psi));
}

QuestionBank read_bank(const std::string& path) { return bank_from_csv(read_csv_file(path), path); }

void write_bank(std::ostream& out, const QuestionBank& bank) {
  const auto& counts = bank.counts();
  out << (counts ? "theta,question,positives,total\n" : "theta,question,psi\n");
  for (std::size_t i = 0; i < bank.rows(); ++i) {
    for (std::size_t y = 0; y < bank.cols(); ++y) {
      out << format_double(bank.qualities()[i]) << ',' << csv_field(bank.questions()[y]) << ',';
      const std::size_t k = i * bank.cols() + y;
      if (counts) {
        out << counts->positives[k] << ',' << counts->totals[k] << '\n';
      } else {
        out << format_double(bank.psi(i, y)) << '\n';
      }
    }
  }
}

void write_bank(const std::string& path, const QuestionBank& bank) {
  std::ostringstream out;
  write_bank(out, bank);
  write_text(path, out.str());
}

// ----------------------------------------------------------------- ratings

std::vector<Rating> ratings_from_csv(const CsvTable& table, const std::string& source) {
  const std::size_t item_col = column(table, "item_id", source);
  const std::size_t question_col = column(table, "question", source);
  const std::size_t response_col = column(table, "response", source);
  std::vector<Rating> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto response = parse_int_field(row[response_col], r + 1, "response");
    if (response != 0 && response != 1) {
      throw ValidationError(schema_error(source, r + 1, "response", "must be 0 or 1"));
    }
    out.push_back({row[item_col], row[question_col], static_cast<int>(response)});
  }
  return out;
}

std::vector<Rating> read_ratings(const std::string& path) {
  return ratings_from_csv(read_csv_file(path), path);
}

std::map<std::string, double> read_qualities(const std::string& path) {
  const auto table = read_csv_file(path);
  const std::size_t item_col = column(table, "item_id", path);
  const std::size_t theta_col = column(table, "theta", path);
  std::map<std::string, double> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double theta = parse_double_field(table.rows[r][theta_col], r + 1, "theta");
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw ValidationError(schema_error(path, r + 1, "theta", "must lie in [0,1]"));
    }
    if (!out.emplace(table.rows[r][item_col], theta).second) {
      throw ValidationError(schema_error(path, r + 1, "item_id", "duplicate item"));
    }
  }
  return out;
}

// -------------------------------------------------------------- simulation

void write_series(std::ostream& out, const SimResult& result) {
  out << "replicate,k,metric,value\n";
  for (const auto& p : result.series) {
    out << p.replicate << ',' << p.k << ',' << to_string(p.metric) << ','
        << format_double(p.value) << '\n';
  }
}

void write_summary(std::ostream& out, const SimResult& result) {
  out << "k,metric,mean,std_error,replicates\n";
  for (const auto& p : result.summary) {
    out << p.k << ',' << to_string(p.metric) << ',' << format_double(p.mean) << ','
        << format_double(p.std_error) << ',' << p.replicates << '\n';
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace ratecraft::io
