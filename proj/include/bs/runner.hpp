#pragma once
// Run configuration and orchestration shared by the CLI and the tests:
// config-file parsing (flat key=value with one section per subcommand),
// the spectrum/convergence drivers, and the sweep thread fan-out.

#include <map>
#include <string>
#include <vector>

#include "bs/report.hpp"

namespace bs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // section name
  // symbol selection
  std::string symbol;
  std::string V, f, p1, p2;
  double window_lo = 0.0, window_hi = 0.0;  // 0,0 = builtin default
  // run parameters
  std::vector<double> h_list;
  double E = 0.0;
  double E_lo = 0.0, E_hi = 0.0;
  double E_max = 0.0;
  int N = 1024;
  double L = 12.0;
  std::string method = "both";  // spectrum: bs|gram|both
  std::string base = "a";       // wkb: a|aprime
  int levels = 5;               // convergence: lowest paired levels in the fit
  // airy-check potentials
  std::string Q0, Q1, Q2, Q3, Q4;
  // output
  std::string out;
  std::string format = "csv";
  int threads = 1;

  double h() const;
  SymbolFamily make() const;

  // Serialize as a config-file section and parse it back.
  std::string to_config() const;
  static RunConfig from_config_text(const std::string& text, const std::string& section);
  static RunConfig from_config_file(const std::string& path, const std::string& section);
};

std::vector<double> parse_list(const std::string& csv);

// Drivers used by both the CLI and the acceptance suite.
SpectrumComparison run_spectrum(const RunConfig& cfg);
ConvergenceReport run_convergence(const RunConfig& cfg);

}  // namespace bs
