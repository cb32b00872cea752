#include "pcma/series_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pcma/errors.hpp"

namespace pcma {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const CsvTable& t, const std::string& path) {
  require(!t.columns.empty(), ErrorCode::InvalidArgument, "table has no columns");
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  for (const std::string& c : t.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    require(row.size() == t.columns.size(), ErrorCode::InvalidArgument,
            "row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_g17(row[i]);
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  CsvTable t;
  std::string line;
  std::size_t lead = 0;
  for (;;) {
    if (!std::getline(in, line)) fail(ErrorCode::ParseError, path + ": empty file");
    ++lead;
    if (line.empty() || line[0] != '#') break;
    std::size_t b = 1;
    while (b < line.size() && line[b] == ' ') ++b;
    t.comments.push_back(line.substr(b));
  }
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);

  std::size_t lineno = lead;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        fail(ErrorCode::ParseError,
             path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      fail(ErrorCode::ParseError,
           path + ":" + std::to_string(lineno) + ": row width does not match the header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable tracking_table(const TrackResult& tr) {
  CsvTable t;
  t.comments = {"m_cap " + format_g17(tr.m_cap)};
  t.columns = {"t", "u_at_atom", "nu_hat", "nu_raw", "resolved_flag", "bound_lo", "bound_hi"};
  for (const TrackRow& r : tr.rows)
    t.rows.push_back({r.t, r.u_at_atom, r.nu_hat, r.nu_raw, static_cast<double>(r.resolved),
                      r.bound_lo, r.bound_hi});
  return t;
}

}  // namespace pcma
