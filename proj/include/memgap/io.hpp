#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "memgap/analysis.hpp"
#include "memgap/format.hpp"
#include "memgap/sample_path.hpp"

namespace memgap {

/// Path file: one header line (d, dt_fine, t_start, t_end), then one row
/// (t, x_1..x_d) per node.
inline void write_path_csv(std::ostream& os, const SamplePath& path) {
  os << "d,dt_fine,t_start,t_end\n";
  os << path.dim() << ',' << format_g17(path.grid().dt()) << ','
     << format_g17(path.grid().t_start()) << ',' << format_g17(path.grid().t_end()) << "\n";
  os << "t";
  for (std::size_t i = 1; i <= path.dim(); ++i) os << ",x_" << i;
  os << "\n";
  for (std::size_t j = 0; j < path.grid().n_nodes(); ++j) {
    os << format_g17(path.grid().node_time(j));
    for (double v : path.node(j)) os << ',' << format_g17(v);
    os << "\n";
  }
}

/// Rate file: data rows (k, error, std_error), then a summary block with the
/// fitted slope, intercept, and r^2 (or `degenerate` markers).
inline void write_rate_csv(std::ostream& os, const RateReport& report) {
  os << "k,error,std_error\n";
  for (std::size_t i = 0; i < report.k_list.size(); ++i)
    os << report.k_list[i] << ',' << format_g17(report.errors[i]) << ','
       << format_g17(report.half_widths[i]) << "\n";
  os << "slope,intercept,r_squared\n";
  if (report.degenerate)
    os << "degenerate,degenerate,degenerate\n";
  else
    os << format_g17(report.slope) << ',' << format_g17(report.intercept) << ','
       << format_g17(report.r_squared) << "\n";
}

struct ValidationRow {
  std::string name;
  double statistic = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool degenerate = false;
};

inline void write_validation_csv(std::ostream& os, const std::vector<ValidationRow>& rows) {
  os << "name,statistic,bound,result\n";
  for (const auto& row : rows)
    os << row.name << ',' << format_g17(row.statistic) << ',' << format_g17(row.bound) << ','
       << (row.degenerate ? "degenerate" : (row.pass ? "pass" : "fail")) << "\n";
}

}  // namespace memgap
