#include "su11/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>

#include "su11/errors.hpp"

namespace su11 {

namespace {

struct Moments {
  CDual G0, N, N2;
};

Moments output_moments(const CDual& w, const Params& p) {
  const int m = p.m;
  const MultiSeries e = series_exp(bilinear_exponent(w, p.beta, {m + 2, m + 2}));
  Moments out;
  out.G0 = extract_mixed(e, {m, m});
  if (!(std::abs(out.G0.value) >= 1e-300)) {
    throw NumericalError(ErrorCode::DarkFringe,
                         "subtraction normalizer vanishes (m = " + std::to_string(m) + ")");
  }
  const CDual G1 = extract_mixed(e, {m + 1, m + 1});
  const CDual G2 = extract_mixed(e, {m + 2, m + 2});
  out.N = G1 / out.G0;
  out.N2 = (G1 + G2) / out.G0;
  return out;
}

SensitivityReport assemble(const Moments& mo, double dN) {
  SensitivityReport r;
  r.mean_N = mo.N.value.real();
  r.mean_N2 = mo.N2.value.real();
  r.norm = 1.0 / std::sqrt(mo.G0.value.real());
  r.d_mean_dphi = dN;
  if (std::abs(mo.N.value.imag()) > 1e-10 * std::max(1.0, std::abs(r.mean_N))) {
    throw NumericalError(ErrorCode::Inconsistent, "<N> has a non-negligible imaginary part");
  }
  double var = r.mean_N2 - r.mean_N * r.mean_N;
  if (var < -1e-10 * r.mean_N2) {
    throw NumericalError(ErrorCode::Inconsistent, "negative photon-number variance");
  }
  var = std::max(var, 0.0);
  if (!(std::abs(dN) > 1e-12 * r.mean_N)) {
    throw NumericalError(ErrorCode::StationaryPoint, "d<N>/dphi vanishes");
  }
  r.delta_phi = std::sqrt(var) / std::abs(dN);
  return r;
}

SensitivityReport from_kernel(const CDual& w, const Params& p) {
  const Moments mo = output_moments(w, p);
  return assemble(mo, mo.N.dphi.real());
}

CDual kernel_for(const Params& p, bool lossy) {
  const KernelSet k = kernels(p);
  return lossy ? k.w3 : k.w1;
}

}  // namespace

SensitivityReport sensitivity_ideal(const Params& p) { return from_kernel(kernel_for(p, false), p); }

SensitivityReport sensitivity_lossy(const Params& p) { return from_kernel(kernel_for(p, true), p); }

SensitivityReport sensitivity_fd(const Params& p, bool lossy, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  auto mean_at = [&](double phi) {
    Params q = p;
    q.phi = phi;
    return output_moments(kernel_for(q, lossy), q).N.value.real();
  };
  const double dN = (mean_at(p.phi + step) - mean_at(p.phi - step)) / (2.0 * step);
  return assemble(output_moments(kernel_for(p, lossy), p), dN);
}

PhaseOptimum optimal_phase(const Params& p, double phi_lo, double phi_hi, bool lossy,
                           int samples) {
  if (!(phi_hi > phi_lo)) throw ValidationError("optimal_phase needs phi_lo < phi_hi");
  if (samples < 3) throw ValidationError("optimal_phase needs at least 3 samples");

  std::exception_ptr last_error;
  auto eval = [&](double phi) -> std::optional<double> {
    Params q = p;
    q.phi = phi;
    try {
      return lossy ? sensitivity_lossy(q).delta_phi : sensitivity_ideal(q).delta_phi;
    } catch (const NumericalError&) {
      last_error = std::current_exception();
      return std::nullopt;
    }
  };

  const double h = (phi_hi - phi_lo) / (samples - 1);
  int best = -1;
  double best_val = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto v = eval(phi_lo + i * h);
    if (v && (best < 0 || *v < best_val)) {
      best = i;
      best_val = *v;
    }
  }
  if (best < 0) std::rethrow_exception(last_error);

  double a = phi_lo + std::max(best - 1, 0) * h;
  double b = phi_lo + std::min(best + 1, samples - 1) * h;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double x) { return eval(x).value_or(INFINITY); };
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-10 * std::max(1.0, std::abs(a))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  PhaseOptimum out{phi_lo + best * h, best_val};
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm < out.delta_phi) out = {xm, fm};
  return out;
}

}  // namespace su11
