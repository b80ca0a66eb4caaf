#pragma once
// Result tables and machine-readable output: BS/reference pairing,
// convergence sweeps, CSV and JSON emission.

#include <optional>
#include <string>
#include <vector>

#include "bs/bs_solver.hpp"

namespace bs {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectrumRow {
  long n = 0;
  double E_bs = 0.0;
  double E_ref = 0.0;
  double error = 0.0;
};

struct SpectrumComparison {
  double h = 0.0;
  std::vector<SpectrumRow> rows;
  double max_error() const;
};

// Nearest-neighbour pairing of BS roots against reference eigenvalues
// restricted to the interval; ambiguous pairings (the gap to the
// next-nearest candidate is under 3x the pairing error) are an error.
SpectrumComparison pair_spectra(const QuantizationResult& bs, const std::vector<double>& ref);

struct ConvergenceReport {
  std::vector<SpectrumComparison> per_h;
  double slope = 0.0;
  bool slope_valid = false;
  std::string notice;  // set when the fit is skipped (floor / single h)
};

// Fit the log-log slope of max paired error vs h over the levels that
// converged; `levels` caps how many lowest rows enter the max.
ConvergenceReport make_convergence_report(std::vector<SpectrumComparison> per_h, int levels);

// Tabular output: fixed column order, %.12e numbers, trailing newline.
struct Table {
  std::vector<std::string> header;
  std::vector<std::string> comments;  // emitted before the header as "# ..."
  std::vector<std::vector<double>> rows;
  std::vector<long> index;  // optional integer first column; empty = none
  std::string index_name;
};

std::string to_csv(const Table& t);
std::string to_json(const Table& t);

void write_output(const std::string& text, const std::string& path);  // path "" = stdout

}  // namespace bs
