#ifndef PCMA_SERIES_IO_HPP
#define PCMA_SERIES_IO_HPP

#include <string>
#include <vector>

#include "pcma/lelong.hpp"

namespace pcma {

// Plain numeric CSV: optional "# ..." comment lines, one header line, then
// rows of %.17g values (17 significant digits, enough to round trip doubles
// exactly through text).
struct CsvTable {
  std::vector<std::string> comments;  // written as leading "# ..." lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_g17(double v);
void write_csv(const CsvTable& t, const std::string& path);
CsvTable read_csv(const std::string& path);

// Tracking table with the fixed column set
// t,u_at_atom,nu_hat,nu_raw,resolved_flag,bound_lo,bound_hi and the value
// floor recorded in a leading comment.
CsvTable tracking_table(const TrackResult& tr);

}  // namespace pcma

#endif
