#pragma once

// Comma-delimited ingestion and serialization. Numbers are written with
// std::to_chars shortest round-trip form; lines starting with '#' are
// comments; parse failures carry 1-based line numbers.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/recruit.hpp"

namespace censimp {

inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_int(long long v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline double parse_double(std::string_view field, long line) {
  field = detail::trim(field);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("expected a number, got '" + std::string(field) + "'", line);
  return out;
}

inline long long parse_int(std::string_view field, long line) {
  field = detail::trim(field);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("expected an integer, got '" + std::string(field) + "'", line);
  return out;
}

inline Date parse_date(std::string_view field, long line) {
  field = detail::trim(field);
  if (field.size() != 10 || field[4] != '-' || field[7] != '-')
    throw ParseError("expected a YYYY-MM-DD date, got '" + std::string(field) + "'", line);
  Date date;
  date.year = static_cast<int>(parse_int(field.substr(0, 4), line));
  date.month = static_cast<unsigned>(parse_int(field.substr(5, 2), line));
  date.day = static_cast<unsigned>(parse_int(field.substr(8, 2), line));
  const Date check = civil_from_days(to_serial(date));
  if (check.year != date.year || check.month != date.month || check.day != date.day)
    throw ParseError("invalid calendar date '" + std::string(field) + "'", line);
  return date;
}

inline std::string format_date(const Date& date) {
  char buf[11];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", date.year, date.month, date.day);
  return std::string(buf);
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> row_lines;  // 1-based source line of each row
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = line.find(',', pos);
      const auto len = (comma == std::string::npos) ? line.size() - pos : comma - pos;
      fields.emplace_back(detail::trim(std::string_view(line).substr(pos, len)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!header_seen) {
      table.columns = std::move(fields);
      header_seen = true;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(table.columns.size()),
                       line_no);
    table.rows.push_back(std::move(fields));
    table.row_lines.push_back(line_no);
  }
  if (!header_seen) throw ParseError("missing header row", line_no);
  return table;
}

inline std::size_t require_column(const CsvTable& table, const std::string& name) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    if (table.columns[j] == name) return j;
  throw ParseError("missing required column '" + name + "'", 1);
}

inline std::optional<std::size_t> find_column(const CsvTable& table, const std::string& name) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    if (table.columns[j] == name) return j;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Censored-covariate datasets: columns y, w, delta, then covariates whose
// names start with 'z' in header order.

struct DatasetFile {
  Dataset records;
  std::vector<std::string> z_names;
};

inline DatasetFile read_dataset(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t y_col = require_column(table, "y");
  const std::size_t w_col = require_column(table, "w");
  const std::size_t d_col = require_column(table, "delta");

  DatasetFile out;
  std::vector<std::size_t> z_cols;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j == y_col || j == w_col || j == d_col) continue;
    if (!table.columns[j].empty() && table.columns[j].front() == 'z') {
      z_cols.push_back(j);
      out.z_names.push_back(table.columns[j]);
    } else {
      throw ParseError("unexpected column '" + table.columns[j] +
                           "' (covariates must be named z...)",
                       1);
    }
  }

  out.records.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const long line = table.row_lines[i];
    auto& r = out.records[i];
    r.y = parse_double(row[y_col], line);
    r.w = parse_double(row[w_col], line);
    const long long delta = parse_int(row[d_col], line);
    if (delta != 0 && delta != 1) throw ParseError("delta must be 0 or 1", line);
    r.delta = static_cast<int>(delta);
    if (!(r.w >= 0.0) || !std::isfinite(r.w))
      throw ParseError("w must be finite and non-negative", line);
    r.z = Eigen::VectorXd(static_cast<Eigen::Index>(z_cols.size()));
    for (std::size_t k = 0; k < z_cols.size(); ++k)
      r.z(static_cast<Eigen::Index>(k)) = parse_double(row[z_cols[k]], line);
  }
  return out;
}

inline void write_dataset(std::ostream& out, const DatasetFile& file) {
  out << "y,w,delta";
  for (const auto& name : file.z_names) out << ',' << name;
  out << '\n';
  for (const auto& r : file.records) {
    out << format_double(r.y) << ',' << format_double(r.w) << ',' << r.delta;
    for (Eigen::Index k = 0; k < r.z.size(); ++k) out << ',' << format_double(r.z(k));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Visit-level files for the recruitment pipeline. The diagnosis column may
// be empty (still undiagnosed at the last visit).

inline std::vector<SubjectVisits> read_visits(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t id_col = require_column(table, "subject_id");
  const std::size_t first_col = require_column(table, "first_visit");
  const std::size_t last_col = require_column(table, "last_visit");
  const std::size_t diag_col = require_column(table, "diagnosis");
  const std::size_t age_col = require_column(table, "age");
  const std::size_t cag_col = require_column(table, "cag");
  const std::size_t cs_col = require_column(table, "cuhdrs_start");
  const std::size_t ce_col = require_column(table, "cuhdrs_end");

  std::vector<SubjectVisits> out(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const long line = table.row_lines[i];
    auto& s = out[i];
    s.subject_id = parse_int(row[id_col], line);
    s.first_visit_date = parse_date(row[first_col], line);
    s.last_visit_date = parse_date(row[last_col], line);
    if (!detail::trim(row[diag_col]).empty())
      s.diagnosis_date = parse_date(row[diag_col], line);
    s.age_at_first_visit = parse_double(row[age_col], line);
    s.cag = static_cast<int>(parse_int(row[cag_col], line));
    if (s.cag < 36) throw ParseError("cag must be at least 36", line);
    s.cuhdrs_start = parse_double(row[cs_col], line);
    s.cuhdrs_end = parse_double(row[ce_col], line);
  }
  return out;
}

inline void write_visits(std::ostream& out, const std::vector<SubjectVisits>& subjects) {
  out << "subject_id,first_visit,last_visit,diagnosis,age,cag,cuhdrs_start,cuhdrs_end\n";
  for (const auto& s : subjects) {
    out << format_int(s.subject_id) << ',' << format_date(s.first_visit_date) << ','
        << format_date(s.last_visit_date) << ','
        << (s.diagnosis_date ? format_date(*s.diagnosis_date) : std::string()) << ','
        << format_double(s.age_at_first_visit) << ',' << s.cag << ','
        << format_double(s.cuhdrs_start) << ',' << format_double(s.cuhdrs_end) << '\n';
  }
}

}  // namespace censimp
