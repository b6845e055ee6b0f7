#pragma once

#include <cmath>
#include <complex>

namespace su11 {

using cplx = std::complex<double>;

// Complex value paired with its first derivative with respect to phi.
struct CDual {
  cplx value{};
  cplx dphi{};

  constexpr CDual() = default;
  constexpr CDual(double v) : value(v) {}
  constexpr CDual(cplx v) : value(v) {}
  constexpr CDual(cplx v, cplx d) : value(v), dphi(d) {}

  CDual& operator+=(const CDual& o) {
    value += o.value;
    dphi += o.dphi;
    return *this;
  }
  CDual& operator-=(const CDual& o) {
    value -= o.value;
    dphi -= o.dphi;
    return *this;
  }
  CDual& operator*=(const CDual& o) {
    dphi = value * o.dphi + dphi * o.value;
    value *= o.value;
    return *this;
  }
  CDual& operator/=(const CDual& o) {
    dphi = (dphi * o.value - value * o.dphi) / (o.value * o.value);
    value /= o.value;
    return *this;
  }
};

inline CDual operator+(CDual a, const CDual& b) { return a += b; }
inline CDual operator-(CDual a, const CDual& b) { return a -= b; }
inline CDual operator*(CDual a, const CDual& b) { return a *= b; }
inline CDual operator/(CDual a, const CDual& b) { return a /= b; }
inline CDual operator-(const CDual& a) { return {-a.value, -a.dphi}; }

inline bool operator==(const CDual& a, const CDual& b) {
  return a.value == b.value && a.dphi == b.dphi;
}

// phi is real, so conjugation commutes with d/dphi.
inline CDual conj(const CDual& a) { return {std::conj(a.value), std::conj(a.dphi)}; }

inline CDual abs2(const CDual& a) { return a * conj(a); }

inline CDual sqrt(const CDual& a) {
  const cplx r = std::sqrt(a.value);
  return {r, a.dphi / (2.0 * r)};
}

// a^(-1/2), used for normalization constants.
inline CDual inv_sqrt(const CDual& a) {
  const cplx r = 1.0 / std::sqrt(a.value);
  return {r, -0.5 * a.dphi * r / a.value};
}

// e^{-i phi} seeded as a function of phi.
inline CDual phase_minus(double phi) {
  const cplx e = std::polar(1.0, -phi);
  return {e, cplx(0.0, -1.0) * e};
}

}  // namespace su11
