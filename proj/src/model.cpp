#include "su11/model.hpp"

#include <cmath>
#include <string>

#include "su11/errors.hpp"

namespace su11 {

namespace {

#ifdef SU11_MUTATE_W3
constexpr double kW3PhaseSign = +1.0;  // deliberately wrong; see tests/CMakeLists.txt
#else
constexpr double kW3PhaseSign = -1.0;
#endif

// (1/2) sinh 2g sqrt(T_out) (1 + sign * sqrt(T_in) e^{-i phi})
CDual output_kernel(double half_sinh_2g, const CDual& e, double t_in, double t_out,
                    double sign) {
  return CDual{half_sinh_2g * std::sqrt(t_out)} *
         (CDual{1.0} + CDual{sign * std::sqrt(t_in)} * e);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void Params::validate() const {
  require(std::isfinite(g) && g >= 0.0, "g must be finite and >= 0");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0");
  require(std::isfinite(phi), "phi must be finite");
  require(m >= 0 && m <= kMaxSubtractions,
          "m must lie in [0, " + std::to_string(kMaxSubtractions) + "]");
  require(T1 >= 0.0 && T1 <= 1.0, "T1 must lie in [0, 1]");
  require(T2 >= 0.0 && T2 <= 1.0, "T2 must lie in [0, 1]");
  require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  require(std::isfinite(alpha), "alpha must be finite");
  require(nu >= 1, "nu must be >= 1");
}

KernelSet kernels(const Params& p) {
  p.validate();
  KernelSet k;
  k.cosh_g = std::cosh(p.g);
  k.sinh_g = std::sinh(p.g);
  k.half_sinh_2g = 0.5 * std::sinh(2.0 * p.g);
  const CDual e = phase_minus(p.phi);
  const CDual ch{k.cosh_g};
  const CDual sh{k.sinh_g};

  k.w1 = output_kernel(k.half_sinh_2g, e, 1.0, 1.0, -1.0);
  k.w2 = ch * ch * e - sh * sh;
  k.w3 = output_kernel(k.half_sinh_2g, e, p.T1, p.T2, kW3PhaseSign);

  k.f1 = ch * e;
  k.f2 = -sh * e;
  k.f3 = k.w2;
  k.f4 = k.w1;

  k.v1 = output_kernel(k.half_sinh_2g, e, p.T1, 1.0, -1.0);
  k.v2 = CDual{-std::sqrt(p.T1) * k.sinh_g} * e;

  k.X1 = output_kernel(k.half_sinh_2g, e, p.eta, 1.0, -1.0);
  return k;
}

MultiSeries bilinear_exponent(const CDual& w, double beta, const Degrees& caps) {
  const auto t = MultiSeries::variable(caps, Dummy::t);
  const auto s = MultiSeries::variable(caps, Dummy::s);
  return s * t * abs2(w) + t * (w * CDual{beta}) + s * (conj(w) * CDual{beta});
}

MultiSeries exponent_A(const Params& p, bool lossy, const Degrees& caps) {
  const KernelSet k = kernels(p);
  return bilinear_exponent(lossy ? k.w3 : k.w1, p.beta, caps);
}

ExponentsB exponents_B(const Params& p) {
  const KernelSet k = kernels(p);
  const CDual b{p.beta};
  const CDual f1 = k.f1, f2 = k.f2, f3 = k.f3, f4 = k.f4;
  const CDual f1c = conj(f1), f2c = conj(f2), f3c = conj(f3), f4c = conj(f4);

  ExponentsB out;
  {
    const Degrees caps{p.m, p.m, 1, 1, 1, 1};
    auto v = [&](Dummy d) { return MultiSeries::variable(caps, d); };
    const auto t = v(Dummy::t), s = v(Dummy::s), c = v(Dummy::c), d = v(Dummy::d),
               pp = v(Dummy::p), h = v(Dummy::h);
    out.F1 = d * (t * (f1c * f3) + pp * (f1c * f1)) + s * pp * (f1 * f3c) +
             pp * h * abs2(f2) + t * (s * (f4 * f4c) + h * (f4 * f2c)) +
             c * (s * (f2 * f4c) + h * (f2 * f2c) + d * (f2 * f2c)) +
             (s * f4c + h * f2c + d * f2c + c * f2 + t * f4 + pp * f2) * b;
  }
  out.F2 = bilinear_exponent(f4, p.beta, {p.m, p.m});
  {
    const Degrees caps{p.m, p.m, 1, 1};
    auto v = [&](Dummy d) { return MultiSeries::variable(caps, d); };
    const auto t = v(Dummy::t), s = v(Dummy::s), c = v(Dummy::c), d = v(Dummy::d);
    out.F3 = t * d * (f1c * f3) + c * d * abs2(f2) + s * t * abs2(f4) + c * s * (f2 * f4c) +
             (d * f2c + s * f4c + c * f2 + t * f4) * b;
    out.F4 = c * s * (f1 * f3c) + s * t * abs2(f4) + c * d * abs2(f2) + t * d * (f2c * f4) +
             (s * f4c + d * f2c + t * f4 + c * f2) * b;
  }
  return out;
}

LossSeries loss_series(const Params& p) {
  const KernelSet k = kernels(p);
  const Degrees caps{p.m, p.m};
  const auto t = MultiSeries::variable(caps, Dummy::t);
  const auto s = MultiSeries::variable(caps, Dummy::s);
  const CDual b{p.beta};
  const CDual i{cplx(0.0, 1.0)};
  const CDual half{k.half_sinh_2g};
  const CDual x1 = k.X1, x1c = conj(k.X1);

  LossSeries out;
  out.X2 = (x1c - half) * (s * (i * b) + s * t * (i * x1));
  out.X3 = (half - x1) * (t * (i * b) + t * s * (i * x1c));
  out.X4 = s * t * ((half - x1) * (x1c - half));
  out.X5 = series_exp(b * (s * x1c + t * x1) + s * t * abs2(x1));
  out.X6 = (t * x1 + b) * (s * x1c + b);
  return out;
}

MultiSeries exponent_n1(const Params& p, const Degrees& caps) {
  return bilinear_exponent(kernels(p).v1, p.beta, caps);
}

MultiSeries exponent_n2(const Params& p) {
  const KernelSet k = kernels(p);
  const Degrees caps{p.m, p.m, 1, 1};
  auto v = [&](Dummy d) { return MultiSeries::variable(caps, d); };
  const auto t = v(Dummy::t), s = v(Dummy::s), c = v(Dummy::c), d = v(Dummy::d);
  const CDual b{p.beta};
  const CDual v1 = k.v1, v1c = conj(k.v1);
  // Mode a contributes T sinh^2 g * b b^dag, mode b cosh^2 g * b^dag b + sinh^2 g,
  // both evaluated on the photon-added coherent state left in mode b.
  const double sh2 = k.sinh_g * k.sinh_g;
  const CDual lambda{std::sqrt(k.cosh_g * k.cosh_g + p.T1 * sh2)};
  const CDual mu{(1.0 + p.T1) * sh2};
  return s * t * abs2(v1) + (t * v1 + s * v1c) * b + (c + d) * (lambda * b) +
         (c * s * v1c + t * d * v1) * lambda + c * d * mu;
}

MultiSeries exponent_n2_as_printed(const Params& p) {
  const KernelSet k = kernels(p);
  const Degrees caps{p.m, p.m, 1, 1};
  auto v = [&](Dummy d) { return MultiSeries::variable(caps, d); };
  const auto t = v(Dummy::t), s = v(Dummy::s), c = v(Dummy::c), d = v(Dummy::d);
  const CDual b{p.beta};
  const CDual ch{k.cosh_g};
  const CDual v1 = k.v1, v1c = conj(k.v1), v2 = k.v2, v2c = conj(k.v2);
  return (c * ch + s * v1c + t * v1 + d * ch) * b + (d * v2c + s * v1c + t * v1 + c * v2) * b +
         (t * v1 + c * v2) * (d * v2c + s * v1c) + s * d * (v1c * ch) +
         c * d * CDual{k.sinh_g * k.sinh_g} + t * v1 * (c * ch + s * v1c);
}

}  // namespace su11
