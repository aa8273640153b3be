#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dolfe/estimator.hpp"
#include "dolfe/version.hpp"

namespace dolfe {

struct ColumnSchema {
  std::string name;
  CovariateKind kind = CovariateKind::discrete;
};

/// Long-format panel layout: one row per individual-period, header required.
struct PanelSchema {
  int num_categories = 4;  // J
  int lag_cutoff = 3;      // k
  std::string id_column = "id";
  std::string time_column = "time";
  std::string outcome_column = "y";
  std::vector<ColumnSchema> covariates;
  std::optional<std::string> group_column;
  char delimiter = ',';
  std::string na_token = "NA";  // empty fields always count as missing
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t individuals_seen = 0;
  std::size_t spells_kept = 0;
  std::size_t dropped_incomplete = 0;  // not exactly 4 consecutive periods
  std::size_t dropped_missing = 0;     // missing outcome or covariate values
  // group -> (individuals seen, spells kept); filled when a group column is set
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> group_counts;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

struct RawRow {
  long long time;
  int y;                     // 0 marks a missing outcome
  std::vector<double> x;     // NaN marks a missing covariate
  bool missing = false;
};

}  // namespace detail

/// Reads a delimited long-format panel, keeps individuals with exactly four
/// consecutive periods and no missing values, and relabels their periods
/// 0..3 by ascending time. The report accounts for every individual.
inline std::pair<PanelDataset, IngestReport> read_panel(const std::string& path,
                                                        const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const auto header = detail::split_line(line, schema.delimiter);
  const auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column '" + name + "' in " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column_of(schema.id_column);
  const std::size_t time_col = column_of(schema.time_column);
  const std::size_t y_col = column_of(schema.outcome_column);
  std::vector<std::size_t> x_cols;
  for (const auto& c : schema.covariates) x_cols.push_back(column_of(c.name));
  std::optional<std::size_t> group_col;
  if (schema.group_column) group_col = column_of(*schema.group_column);

  const auto is_missing = [&](const std::string& s) {
    return s.empty() || s == schema.na_token;
  };

  IngestReport report;
  std::vector<std::string> id_order;
  std::map<std::string, std::vector<detail::RawRow>> rows_by_id;
  std::map<std::string, std::string> group_by_id;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_line(line, schema.delimiter);
    if (fields.size() != header.size())
      throw DataError("malformed row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    ++report.rows_read;

    const std::string& id = fields[id_col];
    double tval;
    if (!detail::parse_double(fields[time_col], tval) || tval != std::floor(tval))
      throw DataError("malformed row " + std::to_string(line_no) + ": bad time value '" +
                      fields[time_col] + "'");

    detail::RawRow row;
    row.time = static_cast<long long>(tval);
    if (is_missing(fields[y_col])) {
      row.y = 0;
      row.missing = true;
    } else {
      double yval;
      if (!detail::parse_double(fields[y_col], yval) || yval != std::floor(yval) ||
          yval < 1 || yval > schema.num_categories)
        throw DataError("malformed row " + std::to_string(line_no) + ": outcome '" +
                        fields[y_col] + "' not an integer in 1.." +
                        std::to_string(schema.num_categories));
      row.y = static_cast<int>(yval);
    }
    for (std::size_t c : x_cols) {
      if (is_missing(fields[c])) {
        row.x.push_back(std::numeric_limits<double>::quiet_NaN());
        row.missing = true;
      } else {
        double xval;
        if (!detail::parse_double(fields[c], xval))
          throw DataError("malformed row " + std::to_string(line_no) +
                          ": non-numeric covariate '" + fields[c] + "'");
        row.x.push_back(xval);
      }
    }

    auto [it, inserted] = rows_by_id.try_emplace(id);
    if (inserted) id_order.push_back(id);
    for (const auto& existing : it->second)
      if (existing.time == row.time)
        throw DataError("duplicate (id, time) = (" + id + ", " + std::to_string(row.time) +
                        ")");
    it->second.push_back(std::move(row));
    if (group_col) group_by_id.try_emplace(id, fields[*group_col]);
  }

  PanelDataset data;
  data.shape.num_categories = schema.num_categories;
  data.shape.lag_cutoff = schema.lag_cutoff;
  data.shape.num_covariates = static_cast<int>(schema.covariates.size());
  for (const auto& c : schema.covariates) {
    data.covariate_names.push_back(c.name);
    data.covariate_kinds.push_back(c.kind);
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;
  report.individuals_seen = id_order.size();
  for (const auto& id : id_order) {
    auto& rows = rows_by_id[id];
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    const std::string group = group_col ? group_by_id[id] : std::string();
    if (group_col) groups[group].first += 1;

    bool consecutive = rows.size() == 4;
    for (std::size_t t = 1; consecutive && t < rows.size(); ++t)
      consecutive = rows[t].time == rows[t - 1].time + 1;
    if (!consecutive) {
      ++report.dropped_incomplete;
      continue;
    }
    bool missing = false;
    for (const auto& r : rows) missing = missing || r.missing;
    if (missing) {
      ++report.dropped_missing;
      continue;
    }

    Spell spell;
    spell.id = id;
    spell.x = Matrix(3, data.shape.num_covariates);
    for (int t = 0; t < 4; ++t) spell.y[t] = rows[t].y;
    for (int t = 1; t <= 3; ++t)
      for (int m = 0; m < data.shape.num_covariates; ++m)
        spell.x(t - 1, m) = rows[t].x[m];
    data.spells.push_back(std::move(spell));
    ++report.spells_kept;
    if (group_col) groups[group].second += 1;
  }
  for (auto& [g, counts] : groups) report.group_counts.emplace_back(g, counts);

  data.validate();
  return {std::move(data), report};
}

/// Pooled one-step transition frequencies over t = 0,1,2.
struct TransitionMatrix {
  Matrix probs;       // J x J; rows with zero marginal stay zero
  Vector row_counts;  // transitions originating in each category
};

inline TransitionMatrix transition_matrix(const PanelDataset& data) {
  data.validate();
  if (data.spells.empty()) throw InvalidParameterError("transition matrix of an empty dataset");
  const int J = data.shape.num_categories;
  TransitionMatrix tm;
  tm.probs = Matrix::Zero(J, J);
  tm.row_counts = Vector::Zero(J);
  for (const Spell& s : data.spells)
    for (int t = 0; t < 3; ++t) {
      tm.probs(s.y[t] - 1, s.y[t + 1] - 1) += 1.0;
      tm.row_counts[s.y[t] - 1] += 1.0;
    }
  for (int r = 0; r < J; ++r)
    if (tm.row_counts[r] > 0.0) tm.probs.row(r) /= tm.row_counts[r];
  return tm;
}

enum class OutputFormat { json, csv };

inline constexpr double kZ975 = 1.959963984540054;

namespace detail {

inline nlohmann::json result_to_json(const FitResult& result) {
  nlohmann::json j;
  j["toolkit"] = std::string("dolfe ") + kVersion;
  j["model"] = {{"J", result.shape.num_categories},
                {"K", result.shape.num_covariates},
                {"k", result.shape.lag_cutoff}};
  j["composite"] = result.composite;
  j["param_names"] = result.param_names;
  j["theta"] = std::vector<double>(result.theta.data(), result.theta.data() + result.theta.size());
  const Vector se = result.se();
  j["se"] = std::vector<double>(se.data(), se.data() + se.size());
  j["loglik"] = result.loglik;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["stop_reason"] = result.stop_reason;
  auto cells = nlohmann::json::array();
  for (const auto& [pair, w] : result.cell_counts)
    cells.push_back({{"j", pair.j}, {"l", pair.l}, {"weight", w}});
  j["cell_counts"] = cells;
  j["warnings"] = result.warnings;
  auto echo = nlohmann::json::object();
  for (const auto& [key, value] : result.config_echo) echo[key] = value;
  j["config"] = echo;
  auto vcov = nlohmann::json::array();
  for (int r = 0; r < result.vcov.rows(); ++r)
    vcov.push_back(std::vector<double>(result.vcov.row(r).begin(), result.vcov.row(r).end()));
  j["vcov"] = {{"names", result.param_names}, {"rows", vcov}};
  return j;
}

}  // namespace detail

/// Serializes a fit. JSON is lossless; CSV emits one row per parameter with
/// normal-approximation 95% intervals.
inline void write_results(const FitResult& result, const std::string& path,
                          OutputFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write to " + path);
  if (format == OutputFormat::json) {
    out << detail::result_to_json(result).dump(2) << '\n';
  } else {
    out << "name,estimate,se,ci_low,ci_high\n";
    const Vector se = result.se();
    char buf[128];
    for (int p = 0; p < result.theta.size(); ++p) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n",
                    result.param_names[p].c_str(), result.theta[p], se[p],
                    result.theta[p] - kZ975 * se[p], result.theta[p] + kZ975 * se[p]);
      out << buf;
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

/// Reads back a JSON fit written by write_results.
inline FitResult read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unparseable results file " + path + ": " + e.what());
  }
  FitResult result;
  result.shape.num_categories = j.at("model").at("J").get<int>();
  result.shape.num_covariates = j.at("model").at("K").get<int>();
  result.shape.lag_cutoff = j.at("model").at("k").get<int>();
  result.composite = j.at("composite").get<bool>();
  result.param_names = j.at("param_names").get<std::vector<std::string>>();
  const auto theta = j.at("theta").get<std::vector<double>>();
  result.theta = Eigen::Map<const Vector>(theta.data(), theta.size());
  result.loglik = j.at("loglik").get<double>();
  result.iterations = j.at("iterations").get<int>();
  result.converged = j.at("converged").get<bool>();
  result.stop_reason = j.at("stop_reason").get<std::string>();
  for (const auto& cell : j.at("cell_counts"))
    result.cell_counts.emplace_back(
        CutoffPair{cell.at("j").get<int>(), cell.at("l").get<int>()},
        cell.at("weight").get<double>());
  result.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& [key, value] : j.at("config").items())
    result.config_echo.emplace_back(key, value.get<std::string>());
  const auto& rows = j.at("vcov").at("rows");
  result.vcov = Matrix(rows.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    result.vcov.row(r) = Eigen::Map<const Vector>(row.data(), row.size());
  }
  return result;
}

/// Serializes a bootstrap summary (SD and percentile intervals per parameter).
inline void write_bootstrap(const BootstrapResult& result, const std::string& path,
                            OutputFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write to " + path);
  if (format == OutputFormat::json) {
    nlohmann::json j;
    j["toolkit"] = std::string("dolfe ") + kVersion;
    j["param_names"] = result.param_names;
    j["se"] = std::vector<double>(result.se.data(), result.se.data() + result.se.size());
    j["ci_low"] =
        std::vector<double>(result.ci_low.data(), result.ci_low.data() + result.ci_low.size());
    j["ci_high"] = std::vector<double>(result.ci_high.data(),
                                       result.ci_high.data() + result.ci_high.size());
    j["requested"] = result.requested;
    j["converged_reps"] = result.converged_reps;
    j["dropped"] = result.dropped;
    out << j.dump(2) << '\n';
  } else {
    out << "name,se,ci_low,ci_high\n";
    char buf[128];
    for (int p = 0; p < result.se.size(); ++p) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", result.param_names[p].c_str(),
                    result.se[p], result.ci_low[p], result.ci_high[p]);
      out << buf;
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

/// Writes a dataset in the long format read_panel expects. Period-0
/// covariates are not part of the model; the period-1 values are repeated
/// there so that every kept row is complete.
inline void write_panel(const PanelDataset& data, const std::string& path,
                        char delimiter = ',') {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write to " + path);
  out << "id" << delimiter << "time" << delimiter << "y";
  for (const auto& name : data.covariate_names) out << delimiter << name;
  out << '\n';
  char buf[64];
  for (const Spell& s : data.spells)
    for (int t = 0; t < 4; ++t) {
      out << s.id << delimiter << t << delimiter << s.y[t];
      for (int m = 0; m < data.shape.num_covariates; ++m) {
        std::snprintf(buf, sizeof(buf), "%.17g", s.x(t == 0 ? 0 : t - 1, m));
        out << delimiter << buf;
      }
      out << '\n';
    }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace dolfe
