#pragma once
// Airy functions on the real line: Maclaurin series in quad precision up
// to |z| = 9 (the series cancellation there eats ~17 digits, which quad
// absorbs), matched to the standard asymptotic expansions beyond.

#include <vector>

namespace bs {

double airy_ai(double z);
double airy_ai_prime(double z);
double airy_bi(double z);
double airy_bi_prime(double z);

// Amplitude corrections and phase of the oscillatory asymptotics in the
// scaled variable z > 0 (depth into the classically allowed side):
//   Ai(-z h^{-2/3}) ~ pi^{-1/2} (z h^{-2/3})^{-1/4} [ sin(phase) R1 - cos(phase) R2 ]
struct OscillatoryAsymptotics {
  double R1 = 1.0;
  double R2 = 0.0;
  double phase = 0.0;  // (2/(3h)) z^{3/2} + pi/4
};

OscillatoryAsymptotics oscillatory_asymptotics(double z, double h);

// The exact rational coefficients of R1 and R2 (frozen from the series).
struct AiryRationals {
  static constexpr double r2_h1 = 5.0 / 48.0;
  static constexpr double r1_h2 = 385.0 / 4608.0;
  static constexpr double r2_h3 = 765765.0 / 5971968.0;
  static constexpr double r1_h4 = 111546435.0 / 382205952.0;
};

// u_k of the standard Airy asymptotic series (u_0 = 1).
std::vector<double> airy_u_coefficients(int count);

}  // namespace bs
