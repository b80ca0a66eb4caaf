#include "bs/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bs/numerics.hpp"

namespace bs {

double SpectrumComparison::max_error() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.error));
  return m;
}

SpectrumComparison pair_spectra(const QuantizationResult& bs, const std::vector<double>& ref) {
  SpectrumComparison cmp;
  cmp.h = bs.h;
  std::vector<double> in_range;
  for (double e : ref)
    if (e >= bs.E_lo - 1e-12 && e <= bs.E_hi + 1e-12) in_range.push_back(e);
  for (const auto& entry : bs.entries) {
    if (in_range.empty()) break;
    size_t best = 0;
    double bd = 1e300;
    for (size_t i = 0; i < in_range.size(); ++i) {
      double d = std::abs(in_range[i] - entry.E);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    double second = 1e300;
    for (size_t i = 0; i < in_range.size(); ++i) {
      if (i == best) continue;
      second = std::min(second, std::abs(in_range[i] - entry.E));
    }
    if (second < 3.0 * bd)
      throw ReportError("ambiguous BS/reference pairing near E = " + std::to_string(entry.E) +
                        " (gap below 3x the pairing error)");
    cmp.rows.push_back({entry.n, entry.E, in_range[best], entry.E - in_range[best]});
  }
  return cmp;
}

ConvergenceReport make_convergence_report(std::vector<SpectrumComparison> per_h, int levels) {
  ConvergenceReport rep;
  rep.per_h = std::move(per_h);
  if (rep.per_h.size() < 2) {
    rep.notice = "slope fit needs at least two h values";
    return rep;
  }
  std::vector<double> lh, le;
  bool at_floor = true;
  for (const auto& cmp : rep.per_h) {
    double err = 0.0;
    size_t count = std::min(rep.per_h.size() ? static_cast<size_t>(levels) : 0,
                            cmp.rows.size());
    for (size_t i = 0; i < count; ++i) err = std::max(err, std::abs(cmp.rows[i].error));
    if (err > 1e-9) at_floor = false;
    if (err > 0.0) {
      lh.push_back(std::log(cmp.h));
      le.push_back(std::log(err));
    }
  }
  if (at_floor) {
    rep.notice = "errors at the quadrature floor; slope fit skipped";
    return rep;
  }
  if (lh.size() < 2) {
    rep.notice = "not enough converged levels for a slope fit";
    return rep;
  }
  rep.slope = fit_slope(lh, le);
  rep.slope_valid = true;
  return rep;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}
}  // namespace

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (const auto& c : t.comments) os << "# " << c << "\n";
  bool first = true;
  if (!t.index.empty()) {
    os << t.index_name;
    first = false;
  }
  for (const auto& h : t.header) {
    if (!first) os << ",";
    os << h;
    first = false;
  }
  os << "\n";
  for (size_t i = 0; i < t.rows.size(); ++i) {
    first = true;
    if (!t.index.empty()) {
      os << t.index[i];
      first = false;
    }
    for (double v : t.rows[i]) {
      if (!first) os << ",";
      os << fmt(v);
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

std::string to_json(const Table& t) {
  std::ostringstream os;
  os << "{\n";
  if (!t.comments.empty()) {
    os << "  \"info\": [";
    for (size_t i = 0; i < t.comments.size(); ++i)
      os << (i ? ", " : "") << "\"" << t.comments[i] << "\"";
    os << "],\n";
  }
  os << "  \"rows\": [\n";
  for (size_t i = 0; i < t.rows.size(); ++i) {
    os << "    {";
    bool first = true;
    if (!t.index.empty()) {
      os << "\"" << t.index_name << "\": " << t.index[i];
      first = false;
    }
    for (size_t j = 0; j < t.header.size(); ++j) {
      if (!first) os << ", ";
      os << "\"" << t.header[j] << "\": " << fmt(t.rows[i][j]);
      first = false;
    }
    os << "}" << (i + 1 < t.rows.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ReportError("cannot open output file: " + path);
  f << text;
}

}  // namespace bs
