#include "bs/airy.hpp"

#include <cmath>
#include <stdexcept>

namespace bs {

namespace {

using quad = __float128;

// Ai(0) and -Ai'(0) as double-double pairs promoted to quad.
const quad kAi0 = quad(0.3550280538878172) + quad(2.05233632436212e-17);
const quad kMAip0 = quad(0.2588194037928068) + quad(-2.522243111610832e-17);

constexpr double kSeriesRadius = 9.0;

// y'' = z y: a_{n+3} = a_n / ((n+2)(n+3)).  f has (a0,a1) = (1,0),
// g has (0,1); Ai = c1 f - c2 g, Bi = sqrt(3) (c1 f + c2 g).
void airy_series(double zd, quad& ai, quad& aip, quad& bi, quad& bip) {
  quad z = zd;
  quad f = 1, fp = 0, g = z, gp = 1;
  quad tf = 1, tg = z;  // current terms a_n z^n
  quad z3 = z * z * z;
  for (int n = 0; n < 400; n += 3) {
    // term for f at exponent n -> n+3; for g at n+1 -> n+4
    quad ntf = tf * z3 / quad((n + 2) * (n + 3));
    quad ntg = tg * z3 / quad((n + 3) * (n + 4));
    f += ntf;
    g += ntg;
    fp += ntf * quad(n + 3) / z;
    gp += ntg * quad(n + 4) / z;
    tf = ntf;
    tg = ntg;
    quad scale = (f > 0 ? f : -f) + (g > 0 ? g : -g) + 1;
    quad m = (ntf > 0 ? ntf : -ntf) + (ntg > 0 ? ntg : -ntg);
    if (m < scale * quad(1e-38)) break;
  }
  const quad sqrt3 = quad(1.7320508075688772) + quad(1.0035084221806903e-16);
  ai = kAi0 * f - kMAip0 * g;
  bi = sqrt3 * (kAi0 * f + kMAip0 * g);
  aip = kAi0 * fp - kMAip0 * gp;
  bip = sqrt3 * (kAi0 * fp + kMAip0 * gp);
}

// z = 0 needs the derivative terms handled without the z division above.
void airy_series_origin(quad& ai, quad& aip, quad& bi, quad& bip) {
  const quad sqrt3 = quad(1.7320508075688772) + quad(1.0035084221806903e-16);
  ai = kAi0;
  aip = -kMAip0;
  bi = sqrt3 * kAi0;
  bip = sqrt3 * kMAip0;
}

}  // namespace

std::vector<double> airy_u_coefficients(int count) {
  std::vector<double> u(static_cast<size_t>(count));
  double cur = 1.0;
  for (int k = 0; k < count; ++k) {
    u[static_cast<size_t>(k)] = cur;
    cur *= double(6 * k + 1) * double(6 * k + 5) / (72.0 * (k + 1));
  }
  return u;
}

namespace {

// Asymptotic values for |z| > kSeriesRadius.
void airy_asymptotic(double z, double& ai, double& aip, double& bi, double& bip) {
  const double rpi = 1.0 / std::sqrt(M_PI);
  auto u = airy_u_coefficients(40);
  std::vector<double> v(u.size());
  v[0] = 1.0;
  for (size_t k = 1; k < u.size(); ++k)
    v[k] = -u[k] * double(6 * k + 1) / double(6 * k - 1);

  if (z > 0) {
    double zeta = 2.0 / 3.0 * std::pow(z, 1.5);
    double am = 0, ap = 0, bm = 0, bp = 0;
    double zp = 1.0, prev = 1e300;
    for (size_t k = 0; k < u.size(); ++k) {
      double tu = u[k] * zp;
      if (std::abs(tu) > prev) break;
      prev = std::abs(tu);
      double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      am += sgn * tu;
      bm += tu;
      ap += sgn * v[k] * zp;
      bp += v[k] * zp;
      zp /= zeta;
    }
    double pref = 0.5 * rpi * std::pow(z, -0.25) * std::exp(-zeta);
    ai = pref * am;
    aip = -0.5 * rpi * std::pow(z, 0.25) * std::exp(-zeta) * ap;
    double prefb = rpi * std::pow(z, -0.25) * std::exp(zeta);
    bi = prefb * bm;
    bip = rpi * std::pow(z, 0.25) * std::exp(zeta) * bp;
    return;
  }

  double w = -z;
  double zeta = 2.0 / 3.0 * std::pow(w, 1.5);
  double ue = 0, uo = 0, ve = 0, vo = 0;
  double zp = 1.0, prev = 1e300;
  for (size_t k = 0; k < u.size(); ++k) {
    double t = u[k] * zp;
    if (std::abs(t) > prev) break;
    prev = std::abs(t);
    if (k % 2 == 0) {
      double sg = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
      ue += sg * t;
      ve += sg * v[k] * zp;
    } else {
      double sg = (((k - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
      uo += sg * t;
      vo += sg * v[k] * zp;
    }
    zp /= zeta;
  }
  double c = std::cos(zeta - M_PI / 4), s = std::sin(zeta - M_PI / 4);
  double prefm = rpi * std::pow(w, -0.25);
  double prefp = rpi * std::pow(w, 0.25);
  ai = prefm * (c * ue + s * uo);
  bi = prefm * (-s * ue + c * uo);
  aip = prefp * (s * ve - c * vo);
  bip = prefp * (c * ve + s * vo);
}

void airy_all(double z, double& ai, double& aip, double& bi, double& bip) {
  if (std::abs(z) <= kSeriesRadius) {
    quad a, apq, b, bpq;
    if (z == 0.0)
      airy_series_origin(a, apq, b, bpq);
    else
      airy_series(z, a, apq, b, bpq);
    ai = double(a);
    aip = double(apq);
    bi = double(b);
    bip = double(bpq);
  } else {
    airy_asymptotic(z, ai, aip, bi, bip);
  }
}

}  // namespace

double airy_ai(double z) {
  double a, ap, b, bp;
  airy_all(z, a, ap, b, bp);
  return a;
}
double airy_ai_prime(double z) {
  double a, ap, b, bp;
  airy_all(z, a, ap, b, bp);
  return ap;
}
double airy_bi(double z) {
  double a, ap, b, bp;
  airy_all(z, a, ap, b, bp);
  return b;
}
double airy_bi_prime(double z) {
  double a, ap, b, bp;
  airy_all(z, a, ap, b, bp);
  return bp;
}

OscillatoryAsymptotics oscillatory_asymptotics(double z, double h) {
  if (!(z > 0)) throw std::domain_error("oscillatory_asymptotics: z must be positive");
  OscillatoryAsymptotics r;
  double z3 = z * z * z;
  double zh = std::pow(z, 1.5);
  r.R1 = 1.0 - AiryRationals::r1_h2 * h * h / z3 +
         AiryRationals::r1_h4 * h * h * h * h / (z3 * z3);
  r.R2 = AiryRationals::r2_h1 * h / zh - AiryRationals::r2_h3 * h * h * h / (zh * z3);
  r.phase = 2.0 / (3.0 * h) * zh + M_PI / 4.0;
  return r;
}

}  // namespace bs
