#include "su11/limits.hpp"

#include <cmath>
#include <string>

#include "su11/errors.hpp"

namespace su11 {

namespace {

double photon_number(const Params& p, const MultiSeries& n2) {
  if (p.T2 != 1.0) {
    throw ValidationError("internal photon number is defined for internal loss only (T2 = 1)");
  }
  const int m = p.m;
  const CDual G = extract_mixed(series_exp(exponent_n1(p, {m, m})), {m, m});
  if (!(std::abs(G.value) >= 1e-300)) {
    throw NumericalError(ErrorCode::DarkFringe,
                         "subtraction normalizer vanishes (m = " + std::to_string(m) + ")");
  }
  const cplx H = extract_mixed(series_exp(n2), {m, m, 1, 1}).value;
  const cplx N = H / G.value;
  if (std::abs(N.imag()) > 1e-10 * std::abs(N.real())) {
    throw NumericalError(ErrorCode::Inconsistent, "N_T has a non-negligible imaginary part");
  }
  return N.real();
}

}  // namespace

double internal_photon_number(const Params& p) { return photon_number(p, exponent_n2(p)); }

double internal_photon_number_as_printed(const Params& p) {
  return photon_number(p, exponent_n2_as_printed(p));
}

LimitsReport limits(const Params& p) {
  LimitsReport r;
  r.N_T = internal_photon_number(p);
  if (!(r.N_T > 0.0)) {
    throw NumericalError(ErrorCode::Normalization, "internal photon number is not positive");
  }
  r.sql = 1.0 / std::sqrt(r.N_T);
  r.hl = 1.0 / r.N_T;
  return r;
}

}  // namespace su11
