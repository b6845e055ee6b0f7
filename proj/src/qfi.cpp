#include "su11/qfi.hpp"

#include <algorithm>
#include <cmath>

#include "su11/errors.hpp"

namespace su11 {

namespace {

constexpr cplx I{0.0, 1.0};

double real_checked(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real()))) {
    throw NumericalError(ErrorCode::Inconsistent,
                         std::string(what) + " has a non-negligible imaginary part");
  }
  return z.real();
}

// Golden-section search for the minimum of f on [a, b].
template <class F>
std::pair<double, double> golden(F&& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
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
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

double qcrb(double F, int nu) {
  if (!(F > 0.0)) throw ValidationError("QCRB needs F > 0");
  if (nu < 1) throw ValidationError("QCRB needs nu >= 1");
  return 1.0 / std::sqrt(nu * F);
}

QfiReport qfi_ideal(const Params& p) {
  const ExponentsB B = exponents_B(p);
  const int m = p.m;
  const CDual G = extract_mixed(series_exp(B.F2), {m, m});
  if (!(std::abs(G.value) >= 1e-300)) {
    throw NumericalError(ErrorCode::DarkFringe,
                         "subtraction normalizer vanishes (m = " + std::to_string(m) + ")");
  }
  const cplx Y = extract_mixed(series_exp(B.F1), {m, m, 1, 1, 1, 1}).value;
  const cplx H3 = extract_mixed(series_exp(B.F3), {m, m, 1, 1}).value;
  const cplx H4 = extract_mixed(series_exp(B.F4), {m, m, 1, 1}).value;

  const CDual N1 = inv_sqrt(G);
  const cplx n = N1.value, dn = N1.dphi, g = G.value;
  const cplx dd = n * n * Y + dn * dn * g + I * n * dn * H4 - I * n * dn * H3;
  const cplx dp = -I * n * n * H3 + dn * n * g;

  QfiReport r;
  r.F = real_checked(4.0 * (dd - std::norm(dp)), "F");
  if (r.F < 0.0) throw NumericalError(ErrorCode::Inconsistent, "negative QFI");
  r.qcrb = qcrb(r.F, p.nu);
  r.F_closed = r.F_numeric = r.F;
  r.terms = {{"<psi'|psi'>", dd}, {"<psi'|psi>", dp}, {"Y", Y}, {"H3", H3}, {"H4", H4},
             {"G", g}};
  return r;
}

LossyTerms lossy_terms(const Params& p, bool include_norm_derivative) {
  const LossSeries X = loss_series(p);
  const KernelSet k = kernels(p);
  const int m = p.m;
  const Degrees caps{m, m};
  auto E = [&](const MultiSeries& s) { return extract_mixed(s * X.X5, {m, m}); };

  const CDual norm = extract_mixed(X.X5, {m, m});
  if (!(std::abs(norm.value) >= 1e-300)) {
    throw NumericalError(ErrorCode::Normalization,
                         "extended-system normalizer vanishes (m = " + std::to_string(m) + ")");
  }
  const cplx q = 1.0 / norm.value;  // N3^2
  const double sh2 = k.sinh_g * k.sinh_g;
  const MultiSeries X6p1 = X.X6 + CDual{1.0};
  const MultiSeries X6p2 = X.X6 + CDual{2.0};

  LossyTerms t;
  t.tt = q * E(X.X2 * X.X3 - X.X4).value;
  t.tp = q * E(X.X3).value;
  t.pt = q * E(X.X2).value;
  const cplx e61 = E(X6p1).value;
  t.n = q * sh2 * e61;
  t.V = q * sh2 * sh2 * E(X.X6 * X.X6 + X.X6 * CDual{4.0} + CDual{2.0}).value + q * sh2 * e61 -
        q * q * sh2 * sh2 * e61 * e61;
  t.tnp = q * sh2 * E(X.X3 * X6p2).value;
  t.pnt = q * sh2 * E(X.X2 * X6p2).value;

  if (include_norm_derivative) {
    // N3 = norm^{-1/2}, so dN3/N3 = -norm'/(2 norm).
    t.r = (-0.5 * norm.dphi / norm.value).real();
    const double r = t.r;
    t.tt += r * (t.tp + t.pt) + r * r;
    t.tp += r;
    t.pt += r;
    t.tnp += r * t.n;
    t.pnt += r * t.n;
  }
  return t;
}

double cq_alpha(const LossyTerms& t, double alpha, double eta) {
  const double k = 1.0 - (1.0 + alpha) * (1.0 - eta);
  const cplx H1 = k * k * (t.V + t.n * t.n) + (1.0 + alpha) * (1.0 + alpha) * eta * (1.0 - eta) * t.n;
  const cplx c = 4.0 * t.tt + 4.0 * H1 + 4.0 * I * k * t.tnp - 4.0 * I * k * t.pnt -
                 4.0 * std::norm(I * t.tp + k * t.n);
  return real_checked(c, "C_Q");
}

double cq_alpha(const Params& p) { return cq_alpha(lossy_terms(p), p.alpha, p.eta); }

double c13_closed(const LossyTerms& t, double eta) {
  const cplx num = 4.0 * eta * t.n * (t.V + I * t.n * t.pt - I * t.n * t.tp + I * t.tnp - I * t.pnt) +
                   (1.0 - eta) * std::pow(t.tnp - t.pnt + t.n * t.pt - t.n * t.tp, 2);
  const cplx den = (1.0 - eta) * t.V + eta * t.n;
  return real_checked(4.0 * (t.tt - std::norm(t.tp)) + num / den, "closed-form F_L");
}

double c13_as_printed(const LossyTerms& t, double eta) {
  const cplx num = 4.0 * eta * t.n * (t.V + I * t.n * t.pt - I * t.n * t.tp) + I * t.tnp - I * t.pnt +
                   (1.0 - eta) * std::pow(t.tnp - t.pnt + t.n * t.pt - t.n * t.tp, 2);
  const cplx den = (1.0 - eta) * t.V + eta * t.n;
  return (4.0 * (t.tt - std::norm(t.tp)) + num / den).real();
}

double alpha_optimal(const LossyTerms& t, double eta) {
  // C_Q is quadratic in alpha; locate the vertex from three samples.
  const double c0 = cq_alpha(t, -1.0, eta), cp = cq_alpha(t, 0.0, eta),
               cm = cq_alpha(t, -2.0, eta);
  const double curv = cp - 2.0 * c0 + cm;
  if (!(curv > 0.0)) {
    throw NumericalError(ErrorCode::StationaryPoint, "C_Q is not convex in alpha");
  }
  return -1.0 - 0.5 * (cp - cm) / curv;
}

QfiReport qfi_lossy(const Params& p) {
  const LossyTerms t = lossy_terms(p);
  const double eta = p.eta;
  auto f = [&](double a) { return cq_alpha(t, a, eta); };

  double lo = -2.0, hi = 1.0;
  std::pair<double, double> best;
  for (int widen = 0;; ++widen) {
    constexpr int n = 61;
    const double h = (hi - lo) / (n - 1);
    int ib = 0;
    double fb = f(lo);
    for (int i = 1; i < n; ++i) {
      const double v = f(lo + i * h);
      if (v < fb) {
        fb = v;
        ib = i;
      }
    }
    const bool at_edge = (ib == 0 || ib == n - 1);
    // A flat C_Q (eta = 1) has no interior minimum worth chasing.
    const bool flat = std::abs(f(lo) - f(hi)) <= 1e-12 * std::abs(fb);
    if (at_edge && !flat && widen < 20) {
      const double w = hi - lo;
      if (ib == 0) lo -= w; else hi += w;
      continue;
    }
    const double a = lo + std::max(ib - 1, 0) * h;
    const double b = lo + std::min(ib + 1, n - 1) * h;
    best = golden(f, a, b);
    if (fb < best.second) best = {lo + ib * h, fb};
    break;
  }

  QfiReport r;
  r.F_closed = c13_closed(t, eta);
  r.F_numeric = best.second;
  r.alpha_star = best.first;
  r.consistent = std::abs(r.F_closed - r.F_numeric) <= 1e-8 * std::abs(r.F_numeric);
  r.F = r.consistent ? r.F_closed : r.F_numeric;
  if (!(r.F > 0.0)) throw NumericalError(ErrorCode::Inconsistent, "non-positive lossy QFI");
  r.qcrb = qcrb(r.F, p.nu);
  r.terms = {{"<Psi~|Psi~>", t.tt}, {"<Psi~|Psi>", t.tp}, {"<Psi|Psi~>", t.pt},
             {"<Psi|n|Psi>", t.n},  {"<Psi|dn^2|Psi>", t.V}, {"<Psi~|n|Psi>", t.tnp},
             {"<Psi|n|Psi~>", t.pnt}};
  return r;
}

}  // namespace su11
