#include "bs/runner.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "bs/reference.hpp"

namespace bs {

double RunConfig::h() const {
  if (h_list.empty()) throw ConfigError("no h value configured");
  return h_list.front();
}

SymbolFamily RunConfig::make() const {
  if (symbol.empty()) throw ConfigError("no symbol configured");
  SymbolFamily s = make_symbol(symbol, V, f);
  if (!p1.empty()) s = s.with_p1(p1);
  if (!p2.empty()) s = s.with_p2(p2);
  if (window_lo != 0.0 || window_hi != 0.0) {
    if (!(window_hi > window_lo)) throw ConfigError("window must satisfy lo < hi");
    s = s.with_well(window_lo, window_hi);
  }
  return s;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    double v = std::stod(item, &pos);
    out.push_back(v);
  }
  return out;
}

namespace {

std::string join_list(const std::vector<double>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    os << buf;
  }
  return os.str();
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string RunConfig::to_config() const {
  std::ostringstream os;
  os << "[" << command << "]\n";
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) os << k << " = " << v << "\n";
  };
  put("symbol", symbol);
  put("V", V);
  put("f", f);
  put("p1", p1);
  put("p2", p2);
  if (window_lo != 0.0 || window_hi != 0.0)
    os << "window = " << fmt_g(window_lo) << "," << fmt_g(window_hi) << "\n";
  if (!h_list.empty()) os << "h = " << join_list(h_list) << "\n";
  if (E != 0.0) os << "E = " << fmt_g(E) << "\n";
  if (E_lo != 0.0 || E_hi != 0.0)
    os << "interval = " << fmt_g(E_lo) << "," << fmt_g(E_hi) << "\n";
  if (E_max != 0.0) os << "Emax = " << fmt_g(E_max) << "\n";
  os << "N = " << N << "\n";
  os << "L = " << fmt_g(L) << "\n";
  put("method", method);
  put("base", base);
  os << "levels = " << levels << "\n";
  put("Q0", Q0);
  put("Q1", Q1);
  put("Q2", Q2);
  put("Q3", Q3);
  put("Q4", Q4);
  put("out", out);
  put("format", format);
  os << "threads = " << threads << "\n";
  return os.str();
}

RunConfig RunConfig::from_config_text(const std::string& text, const std::string& section) {
  RunConfig cfg;
  cfg.command = section;
  std::istringstream is(text);
  std::string line, cur;
  bool seen = false;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      cur = line.substr(1, line.size() - 2);
      if (cur == section) seen = true;
      continue;
    }
    if (cur != section) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bad config line: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "symbol")
      cfg.symbol = val;
    else if (key == "V")
      cfg.V = val;
    else if (key == "f")
      cfg.f = val;
    else if (key == "p1")
      cfg.p1 = val;
    else if (key == "p2")
      cfg.p2 = val;
    else if (key == "window") {
      auto v = parse_list(val);
      if (v.size() != 2) throw ConfigError("window needs lo,hi");
      cfg.window_lo = v[0];
      cfg.window_hi = v[1];
    } else if (key == "h")
      cfg.h_list = parse_list(val);
    else if (key == "E")
      cfg.E = std::stod(val);
    else if (key == "interval") {
      auto v = parse_list(val);
      if (v.size() != 2) throw ConfigError("interval needs lo,hi");
      cfg.E_lo = v[0];
      cfg.E_hi = v[1];
    } else if (key == "Emax")
      cfg.E_max = std::stod(val);
    else if (key == "N")
      cfg.N = std::stoi(val);
    else if (key == "L")
      cfg.L = std::stod(val);
    else if (key == "method")
      cfg.method = val;
    else if (key == "base")
      cfg.base = val;
    else if (key == "levels")
      cfg.levels = std::stoi(val);
    else if (key == "Q0")
      cfg.Q0 = val;
    else if (key == "Q1")
      cfg.Q1 = val;
    else if (key == "Q2")
      cfg.Q2 = val;
    else if (key == "Q3")
      cfg.Q3 = val;
    else if (key == "Q4")
      cfg.Q4 = val;
    else if (key == "out")
      cfg.out = val;
    else if (key == "format")
      cfg.format = val;
    else if (key == "threads")
      cfg.threads = std::stoi(val);
    else
      throw ConfigError("unknown config key: " + key);
  }
  if (!seen) throw ConfigError("config has no [" + section + "] section");
  return cfg;
}

RunConfig RunConfig::from_config_file(const std::string& path, const std::string& section) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_config_text(ss.str(), section);
}

SpectrumComparison run_spectrum(const RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  ActionEngine engine(sym);
  QuantizationResult bs = quantize(engine, cfg.h(), cfg.E_lo, cfg.E_hi);
  double margin = 2.0 * M_PI * cfg.h();  // keep one spacing of slack at the edges
  EigenvalueList ref =
      low_eigenvalues(sym, cfg.h(), cfg.E_hi + margin, cfg.N, cfg.L);
  return pair_spectra(bs, ref.values);
}

ConvergenceReport run_convergence(const RunConfig& cfg) {
  if (cfg.h_list.empty()) throw ConfigError("convergence needs an h list");
  SymbolFamily sym = cfg.make();
  // one shared action engine: the period-integral cache is keyed by E
  // only, so sweep items reuse each other's orbits
  auto engine = std::make_shared<ActionEngine>(sym);

  auto one = [&](double h) {
    QuantizationResult bs = quantize(*engine, h, cfg.E_lo, cfg.E_hi, 129);
    EigenvalueList ref = low_eigenvalues(sym, h, cfg.E_hi + 2.0 * M_PI * h, cfg.N, cfg.L);
    return pair_spectra(bs, ref.values);
  };

  std::vector<SpectrumComparison> per_h(cfg.h_list.size());
  if (cfg.threads > 1) {
    std::vector<std::future<SpectrumComparison>> futures;
    for (double h : cfg.h_list)
      futures.push_back(std::async(std::launch::async, one, h));
    for (size_t i = 0; i < futures.size(); ++i) per_h[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < cfg.h_list.size(); ++i) per_h[i] = one(cfg.h_list[i]);
  }
  return make_convergence_report(std::move(per_h), cfg.levels);
}

}  // namespace bs
