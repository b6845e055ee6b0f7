#pragma once

#include "su11/cdual.hpp"
#include "su11/series.hpp"

namespace su11 {

// Largest subtraction count: keeps every extraction order within the
// floating-point factorial table.
inline constexpr int kMaxSubtractions = 15;

/// Interferometer configuration under the balance conditions
/// (OPA phases 0 and pi, equal gains, real coherent amplitude).
struct Params {
  double g = 1.0;      // OPA gain
  double beta = 1.0;   // coherent amplitude |beta| in mode b
  double phi = 0.4;    // phase shift [rad]
  int m = 0;           // photons subtracted at output port a
  double T1 = 1.0;     // internal transmittance (mode a, before the phase shifter)
  double T2 = 1.0;     // external transmittance (mode a, before subtraction)
  double eta = 1.0;    // loss transmissivity of the Kraus model used for the lossy QFI
  double alpha = 0.0;  // Kraus placement parameter
  int nu = 1;          // repetitions entering the QCRB

  void validate() const;
  bool operator==(const Params&) const = default;
};

/// Kernel coefficients of the generating functions, each carrying d/dphi.
struct KernelSet {
  CDual w1, w2, w3;          // ideal/lossy output kernels
  CDual f1, f2, f3, f4;      // equivalent-model kernels
  CDual v1, v2;              // internal photon number kernels (T = T1)
  CDual X1;                  // extended-system kernel (eta)
  double cosh_g = 1.0;
  double sinh_g = 0.0;
  double half_sinh_2g = 0.0;
};

KernelSet kernels(const Params& p);

// st|w|^2 + (t w + s w*) beta on the (t, s) leading variables of `caps`.
MultiSeries bilinear_exponent(const CDual& w, double beta, const Degrees& caps);

/// A1 (lossy = false, kernel w1) or A2 (lossy = true, kernel w3).
MultiSeries exponent_A(const Params& p, bool lossy, const Degrees& caps);

struct ExponentsB {
  MultiSeries F1;  // caps (m, m, 1, 1, 1, 1) over (t, s, c, d, p, h)
  MultiSeries F2;  // caps (m, m)
  MultiSeries F3;  // caps (m, m, 1, 1) over (t, s, c, d)
  MultiSeries F4;  // caps (m, m, 1, 1)
};

ExponentsB exponents_B(const Params& p);

/// X2..X6 as two-variable series with caps (m, m); X5 is already exponentiated.
struct LossSeries {
  MultiSeries X2, X3, X4, X5, X6;
};

LossSeries loss_series(const Params& p);

MultiSeries exponent_n1(const Params& p, const Degrees& caps);

/// Generating exponent for the internal photon number, caps (m, m, 1, 1).
MultiSeries exponent_n2(const Params& p);

/// The printed variant of the same exponent; it does not reproduce N_T and
/// is kept only so the discrepancy stays testable.
MultiSeries exponent_n2_as_printed(const Params& p);

}  // namespace su11
