// Command-line front end for the Bohr-Sommerfeld toolkit.
//
// Subcommands: spectrum, actions, orbit, wkb, gram, reference,
// convergence, airy-check.  Exit codes: 0 success, 2 configuration
// error, 3 numerical non-convergence.

#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "bs/normal_form.hpp"
#include "bs/reference.hpp"
#include "bs/runner.hpp"
#include "bs/wkb.hpp"

namespace {

using namespace bs;

void add_symbol_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--symbol", cfg.symbol,
                  "builtin: harmonic, schrodinger, tilted, quartic_kinetic, harper");
  cmd->add_option("--V", cfg.V, "potential expression in x");
  cmd->add_option("--f", cfg.f, "tilt expression in x (tilted symbol)");
  cmd->add_option("--p1", cfg.p1, "sub-principal symbol expression in x, xi");
  cmd->add_option("--p2", cfg.p2, "second-order symbol expression in x, xi");
  cmd->add_option_function<std::string>(
      "--window", [&cfg](const std::string& s) {
        auto v = parse_list(s);
        if (v.size() != 2) throw CLI::ValidationError("--window needs lo,hi");
        cfg.window_lo = v[0];
        cfg.window_hi = v[1];
      },
      "well window hint lo,hi");
}

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "config file; CLI flags override its values");
  cmd->add_option("--out", cfg.out, "output path (default: stdout)");
  cmd->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", cfg.threads, "sweep concurrency");
}

std::string emit(const Table& t, const RunConfig& cfg) {
  return cfg.format == "json" ? to_json(t) : to_csv(t);
}

int cmd_spectrum(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  double h = cfg.h();
  Table t;
  t.index_name = "n";
  t.header = {"E_bs", "E_gram", "det_residual"};
  if (cfg.method == "bs" || cfg.method == "both") {
    ActionEngine engine(sym);
    QuantizationResult bs = quantize(engine, h, cfg.E_lo, cfg.E_hi);
    for (const auto& e : bs.entries) {
      t.index.push_back(e.n);
      t.rows.push_back({e.E, std::nan(""), std::nan("")});
    }
  }
  if (cfg.method == "gram" || cfg.method == "both") {
    WkbEngine wkb(sym);
    std::vector<GramRoot> gram = gram_zero_scan(wkb, h, cfg.E_lo, cfg.E_hi);
    if (cfg.method == "gram") {
      for (const auto& g : gram) {
        t.index.push_back(g.n);
        t.rows.push_back({std::nan(""), g.E, g.det_residual});
      }
    } else {
      for (size_t i = 0; i < t.rows.size() && i < gram.size(); ++i) {
        t.rows[i][1] = gram[i].E;
        t.rows[i][2] = gram[i].det_residual;
      }
    }
  }
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_actions(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  ActionEngine engine(sym);
  ActionSeries a = engine.action_series(cfg.E);
  Table t;
  t.header = {"S0", "S1", "S2", "S2_spectral", "T", "loop_delta", "loop_p1", "loop_p1sq",
              "loop_p2", "loop_gamma"};
  std::vector<double> row = {a.S0,
                             a.S1,
                             a.S2,
                             engine.s2_spectral(cfg.E),
                             a.diagnostics.T,
                             a.diagnostics.i_delta,
                             a.diagnostics.i_p1,
                             a.diagnostics.i_p1sq,
                             a.diagnostics.i_p2,
                             a.diagnostics.i_gamma};
  if (!cfg.h_list.empty()) {
    t.header.push_back("S_h");
    row.push_back(engine.spectral_action(cfg.E, cfg.h()));
  }
  t.rows.push_back(row);
  if (cfg.format.empty()) cfg.format = "json";
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_orbit(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  Orbit orb = integrate_orbit(sym, cfg.E);
  Table t;
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "E=%.12e T=%.12e focal_right=(%.12e,%.12e) focal_left=(%.12e,%.12e)", orb.E,
                  orb.period, orb.focal_right.x, orb.focal_right.xi, orb.focal_left.x,
                  orb.focal_left.xi);
    t.comments.push_back(buf);
  }
  t.header = {"t", "x", "xi"};
  for (const auto& s : orb.samples) t.rows.push_back({s.t, s.x, s.xi});
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_wkb(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  WkbEngine eng(sym);
  double h = cfg.h();
  FocalBase base = cfg.base == "aprime" ? FocalBase::a_prime : FocalBase::a;
  auto orb = eng.orbit(cfg.E);
  double w = orb->width();
  double lo = orb->focal_left.x + 0.01 * w, hi = orb->focal_right.x - 0.01 * w;
  Table t;
  t.header = {"x", "re_u", "im_u", "abs_u"};
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * i / (n - 1);
    Complex u = eng.wkb_eval(cfg.E, base, h, x);
    t.rows.push_back({x, u.real(), u.imag(), std::abs(u)});
  }
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_gram(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  WkbEngine wkb(sym);
  std::vector<GramRoot> gram = gram_zero_scan(wkb, cfg.h(), cfg.E_lo, cfg.E_hi);
  Table t;
  t.index_name = "n";
  t.header = {"E_gram", "det_residual"};
  for (const auto& g : gram) {
    t.index.push_back(g.n);
    t.rows.push_back({g.E, g.det_residual});
  }
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_reference(RunConfig& cfg) {
  SymbolFamily sym = cfg.make();
  EigenvalueList list = low_eigenvalues(sym, cfg.h(), cfg.E_max, cfg.N, cfg.L);
  Table t;
  t.index_name = "index";
  t.header = {"eigenvalue", "convergence_certificate"};
  for (size_t i = 0; i < list.values.size(); ++i) {
    t.index.push_back(static_cast<long>(i));
    t.rows.push_back({list.values[i], list.certificates[i]});
  }
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_convergence(RunConfig& cfg) {
  ConvergenceReport rep = run_convergence(cfg);
  Table t;
  t.header = {"h", "n", "E_bs", "E_ref", "error"};
  for (const auto& cmp : rep.per_h)
    for (const auto& r : cmp.rows)
      t.rows.push_back({cmp.h, double(r.n), r.E_bs, r.E_ref, r.error});
  if (rep.slope_valid) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "slope = %.6f", rep.slope);
    t.comments.push_back(buf);
  } else {
    t.comments.push_back(rep.notice);
  }
  write_output(emit(t, cfg), cfg.out);
  return 0;
}

int cmd_airy_check(RunConfig& cfg) {
  PotentialSeries ps = PotentialSeries::from_strings(cfg.Q0, cfg.Q1, cfg.Q2, cfg.Q3, cfg.Q4);
  if (cfg.h_list.empty()) cfg.h_list = {0.1, 0.05, 0.025};

  auto ts = transport_series(ps, 6);
  auto q0t = ps.taylor(0, 3);
  double v2 = q0t[2], v3 = q0t[3];
  double formula = 3.0 / 7.0 * v3 - 9.0 / 35.0 * v2 * v2;
  bool taylor_applicable = !ps.has(1) && !ps.has(2);

  MasterResidualReport master = master_residual(ps, {1e2, 1e3, 1e4});
  AnsatzReport ansatz = ansatz_check(ps, cfg.h_list);

  std::ostringstream os;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return std::string(buf);
  };
  os << "{\n";
  os << "  \"taylor_check\": {\"x2_at_0\": " << num(ts.x[2][0])
     << ", \"series_formula\": " << num(formula)
     << ", \"applicable\": " << (taylor_applicable ? "true" : "false") << "},\n";
  os << "  \"master_residual_slope\": " << num(master.slope) << ",\n";
  os << "  \"master_residuals\": [";
  for (size_t i = 0; i < master.residual.size(); ++i)
    os << (i ? ", " : "") << num(master.residual[i]);
  os << "],\n";
  os << "  \"ansatz\": [\n";
  for (size_t i = 0; i < ansatz.entries.size(); ++i) {
    const auto& e = ansatz.entries[i];
    os << "    {\"h\": " << num(e.h) << ", \"phase_error\": " << num(e.phase_error)
       << ", \"residual_full\": " << num(e.residual_full)
       << ", \"residual_bare\": " << num(e.residual_bare) << "}"
       << (i + 1 < ansatz.entries.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  write_output(os.str(), cfg.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order Bohr-Sommerfeld spectra for 1-D semiclassical Hamiltonians"};
  app.require_subcommand(1);

  struct Sub {
    RunConfig cfg;
    std::string config_path;
    CLI::App* cmd = nullptr;
  };
  std::map<std::string, Sub> subs;

  app.set_help_flag("--help", "print help");  // keep --h free for the semiclassical parameter

  auto add = [&](const std::string& name, const std::string& desc) -> Sub& {
    Sub& s = subs[name];
    s.cfg.command = name;
    s.cmd = app.add_subcommand(name, desc);
    s.cmd->set_help_flag("--help", "print help");
    add_common(s.cmd, s.cfg, s.config_path);
    return s;
  };

  {
    Sub& s = add("spectrum", "BS and Gram-root eigenvalue predictions");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--h", s.cfg.h_list, "semiclassical parameter");
    s.cmd->add_option_function<std::string>(
        "--interval", [&cfg = s.cfg](const std::string& v) {
          auto p = parse_list(v);
          if (p.size() != 2) throw CLI::ValidationError("--interval needs a,b");
          cfg.E_lo = p[0];
          cfg.E_hi = p[1];
        },
        "energy interval a,b");
    s.cmd->add_option("--method", s.cfg.method, "bs, gram or both")
        ->check(CLI::IsMember({"bs", "gram", "both"}));
  }
  {
    Sub& s = add("actions", "action series S0, S1, S2 at one energy");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--E", s.cfg.E, "energy")->required();
    s.cmd->add_option("--h", s.cfg.h_list, "also report S_h at this h");
    s.cfg.format = "json";
  }
  {
    Sub& s = add("orbit", "closed-orbit samples (t, x, xi)");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--E", s.cfg.E, "energy")->required();
  }
  {
    Sub& s = add("wkb", "WKB solution samples on the classically allowed interval");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--E", s.cfg.E, "energy")->required();
    s.cmd->add_option("--h", s.cfg.h_list, "semiclassical parameter")->required();
    s.cmd->add_option("--base", s.cfg.base, "focal base: a or aprime")
        ->check(CLI::IsMember({"a", "aprime"}));
  }
  {
    Sub& s = add("gram", "Gram-determinant zero scan");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--h", s.cfg.h_list, "semiclassical parameter")->required();
    s.cmd->add_option_function<std::string>(
        "--interval", [&cfg = s.cfg](const std::string& v) {
          auto p = parse_list(v);
          if (p.size() != 2) throw CLI::ValidationError("--interval needs a,b");
          cfg.E_lo = p[0];
          cfg.E_hi = p[1];
        },
        "energy interval a,b");
  }
  {
    Sub& s = add("reference", "grid-operator eigenvalues with convergence certificates");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--h", s.cfg.h_list, "semiclassical parameter")->required();
    s.cmd->add_option("--Emax", s.cfg.E_max, "report eigenvalues up to this energy")->required();
    s.cmd->add_option("--N", s.cfg.N, "grid size");
    s.cmd->add_option("--L", s.cfg.L, "box half-width");
  }
  {
    Sub& s = add("convergence", "BS vs reference error sweep over an h list");
    add_symbol_options(s.cmd, s.cfg);
    s.cmd->add_option("--h-list", s.cfg.h_list, "h values")->delimiter(',');
    s.cmd->add_option_function<std::string>(
        "--interval", [&cfg = s.cfg](const std::string& v) {
          auto p = parse_list(v);
          if (p.size() != 2) throw CLI::ValidationError("--interval needs a,b");
          cfg.E_lo = p[0];
          cfg.E_hi = p[1];
        },
        "energy interval a,b");
    s.cmd->add_option("--levels", s.cfg.levels, "lowest paired levels entering the fit");
    s.cmd->add_option("--N", s.cfg.N, "grid size");
    s.cmd->add_option("--L", s.cfg.L, "box half-width");
  }
  {
    Sub& s = add("airy-check", "Airy normal-form diagnostics");
    s.cmd->add_option("--Q0", s.cfg.Q0, "potential with a normalized simple zero")->required();
    s.cmd->add_option("--Q1", s.cfg.Q1, "order h term");
    s.cmd->add_option("--Q2", s.cfg.Q2, "order h^2 term");
    s.cmd->add_option("--Q3", s.cfg.Q3, "order h^3 term");
    s.cmd->add_option("--Q4", s.cfg.Q4, "order h^4 term");
    s.cmd->add_option("--h-list", s.cfg.h_list, "h values")->delimiter(',');
    s.cfg.format = "json";
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, sub] : subs) {
    if (!sub.cmd->parsed()) continue;
    try {
      RunConfig cfg = sub.cfg;
      if (!sub.config_path.empty()) {
        // config provides defaults; explicit CLI flags stay in force
        RunConfig file_cfg = RunConfig::from_config_file(sub.config_path, name);
        file_cfg.command = name;
        RunConfig merged = file_cfg;
        auto keep = [&](auto cli_value, auto def, auto member) {
          if (cli_value != def) merged.*member = cli_value;
        };
        (void)keep;
        // CLI override: any non-default field from the parsed flags wins
        if (!cfg.symbol.empty()) merged.symbol = cfg.symbol;
        if (!cfg.V.empty()) merged.V = cfg.V;
        if (!cfg.f.empty()) merged.f = cfg.f;
        if (!cfg.p1.empty()) merged.p1 = cfg.p1;
        if (!cfg.p2.empty()) merged.p2 = cfg.p2;
        if (cfg.window_lo != 0.0 || cfg.window_hi != 0.0) {
          merged.window_lo = cfg.window_lo;
          merged.window_hi = cfg.window_hi;
        }
        if (!cfg.h_list.empty()) merged.h_list = cfg.h_list;
        if (cfg.E != 0.0) merged.E = cfg.E;
        if (cfg.E_lo != 0.0 || cfg.E_hi != 0.0) {
          merged.E_lo = cfg.E_lo;
          merged.E_hi = cfg.E_hi;
        }
        if (cfg.E_max != 0.0) merged.E_max = cfg.E_max;
        if (cfg.N != 1024) merged.N = cfg.N;
        if (cfg.L != 12.0) merged.L = cfg.L;
        if (cfg.method != "both") merged.method = cfg.method;
        if (cfg.base != "a") merged.base = cfg.base;
        if (cfg.levels != 5) merged.levels = cfg.levels;
        if (!cfg.Q0.empty()) merged.Q0 = cfg.Q0;
        if (!cfg.Q1.empty()) merged.Q1 = cfg.Q1;
        if (!cfg.Q2.empty()) merged.Q2 = cfg.Q2;
        if (!cfg.Q3.empty()) merged.Q3 = cfg.Q3;
        if (!cfg.Q4.empty()) merged.Q4 = cfg.Q4;
        if (!cfg.out.empty()) merged.out = cfg.out;
        if (cfg.format != "csv" && cfg.format != "") merged.format = cfg.format;
        if (cfg.threads != 1) merged.threads = cfg.threads;
        cfg = merged;
      }
      if (name == "spectrum") return cmd_spectrum(cfg);
      if (name == "actions") return cmd_actions(cfg);
      if (name == "orbit") return cmd_orbit(cfg);
      if (name == "wkb") return cmd_wkb(cfg);
      if (name == "gram") return cmd_gram(cfg);
      if (name == "reference") return cmd_reference(cfg);
      if (name == "convergence") return cmd_convergence(cfg);
      if (name == "airy-check") return cmd_airy_check(cfg);
    } catch (const ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 2;
    } catch (const ParseError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "numerical error: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
