#include "bs/actions.hpp"

#include <cmath>

#include "bs/numerics.hpp"

namespace bs {

PeriodIntegrals ActionEngine::compute(double E) const {
  auto orb = std::make_shared<Orbit>(integrate_orbit(sym_, E, orbit_tol_));
  PeriodIntegrals pi;
  pi.orbit = orb;
  pi.diag.T = orb->period;

  const bool has1 = sym_.has(1), has2 = sym_.has(2);
  double s0 = 0, ip1 = 0, ip1sq = 0, ip2 = 0, idelta = 0, igamma = 0;
  for (const auto& s : orb->samples) {
    s0 += s.xi * s.xdot;
    PartialTable p = sym_.partials(0, s.x, s.xi);
    idelta += p(2, 0) * p(0, 2) - p(1, 1) * p(1, 1);
    igamma += (p(2, 0) * p(0, 1) - p(1, 1) * p(1, 0)) * s.xdot +
              (p(1, 1) * p(0, 1) - p(0, 2) * p(1, 0)) * s.xidot;
    if (has1) {
      double v = sym_.eval(1, s.x, s.xi);
      ip1 += v;
      ip1sq += v * v;
    }
    if (has2) ip2 += sym_.eval(2, s.x, s.xi);
  }
  double w = orb->period / double(orb->samples.size());
  pi.S0 = s0 * w;
  pi.diag.i_delta = idelta * w;
  pi.diag.i_gamma = igamma * w;
  pi.diag.i_p1 = ip1 * w;
  pi.diag.i_p1sq = ip1sq * w;
  pi.diag.i_p2 = ip2 * w;
  return pi;
}

const PeriodIntegrals& ActionEngine::at(double E) const {
  std::lock_guard<std::mutex> lock(cache_->mtx);
  auto it = cache_->map.find(E);
  if (it == cache_->map.end()) {
    // compute outside the map insertion but under the lock: single-writer
    // contract, callers on other threads wait rather than duplicate work.
    PeriodIntegrals pi = compute(E);
    it = cache_->map.emplace(E, std::move(pi)).first;
  }
  return it->second;
}

double ActionEngine::subprincipal_term(double E) const { return M_PI - at(E).diag.i_p1; }

double ActionEngine::s2(double E) const {
  double d_delta = d_dE([this](double e) { return at(e).diag.i_delta; }, E, 1);
  double term = d_delta / 24.0 - at(E).diag.i_p2;
  if (sym_.has(1))
    term -= 0.5 * d_dE([this](double e) { return at(e).diag.i_p1sq; }, E, 1);
  return term;
}

double ActionEngine::s2_gamma_form(double E) const {
  double dd_gamma = d_dE([this](double e) { return at(e).diag.i_gamma; }, E, 2);
  double term = dd_gamma / 48.0 - at(E).diag.i_p2;
  if (sym_.has(1))
    term -= 0.5 * d_dE([this](double e) { return at(e).diag.i_p1sq; }, E, 1);
  return term;
}

double ActionEngine::s2_spectral(double E) const {
  double d_delta = d_dE([this](double e) { return at(e).diag.i_delta; }, E, 1);
  double term = -d_delta / 24.0 - at(E).diag.i_p2;
  if (sym_.has(1))
    term += 0.5 * d_dE([this](double e) { return at(e).diag.i_p1sq; }, E, 1);
  return term;
}

double ActionEngine::spectral_action(double E, double h) const {
  const PeriodIntegrals& pi = at(E);
  return pi.S0 + h * (M_PI - pi.diag.i_p1) + h * h * s2_spectral(E);
}

ActionSeries ActionEngine::action_series(double E) const {
  ActionSeries a;
  a.E = E;
  const PeriodIntegrals& pi = at(E);
  a.S0 = pi.S0;
  a.S1 = M_PI - pi.diag.i_p1;
  a.S2 = s2(E);
  a.diagnostics = pi.diag;
  return a;
}

void ActionEngine::clear_cache() const {
  std::lock_guard<std::mutex> lock(cache_->mtx);
  cache_->map.clear();
}

size_t ActionEngine::cache_size() const {
  std::lock_guard<std::mutex> lock(cache_->mtx);
  return cache_->map.size();
}

}  // namespace bs
