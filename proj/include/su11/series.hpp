#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "su11/cdual.hpp"

namespace su11 {

// Dummy variables of the generating functions, in the order they are
// laid out in the series arity.
enum class Dummy : int { t = 0, s = 1, c = 2, d = 3, p = 4, h = 5 };

using Degrees = std::vector<int>;

/// Truncated multivariate power series with CDual coefficients.
///
/// Coefficients are stored densely over the box 0 <= k_i <= caps_i. Products
/// drop every term that leaves the box, so truncation is exact for all
/// coefficients that remain inside it.
class MultiSeries {
 public:
  MultiSeries() = default;
  explicit MultiSeries(Degrees caps);

  static MultiSeries constant(Degrees caps, CDual value);
  // Single monomial `coeff * x_var`; the zero series when caps[var] == 0.
  static MultiSeries variable(Degrees caps, Dummy var, CDual coeff = 1.0);
  static MultiSeries variable(Degrees caps, int var, CDual coeff = 1.0);

  std::size_t arity() const noexcept { return caps_.size(); }
  const Degrees& caps() const noexcept { return caps_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  const CDual& coeff(const Degrees& index) const;
  const CDual& constant_term() const { return coeffs_.front(); }
  // Multi-index of the flat storage position `flat`.
  Degrees index_of(std::size_t flat) const;

  MultiSeries& operator+=(const MultiSeries& o);
  MultiSeries& operator-=(const MultiSeries& o);
  MultiSeries& operator*=(const CDual& k);
  MultiSeries& operator+=(const CDual& k);

  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);

  // Same box, same coefficients to `tol` (absolute, on both channels).
  bool approx_equal(const MultiSeries& o, double tol) const;

 private:
  friend MultiSeries series_exp(const MultiSeries& p);
  friend MultiSeries series_from_poly(std::size_t, Degrees,
                                      const std::vector<std::pair<Degrees, CDual>>&);

  std::size_t flat(const Degrees& index) const;
  void check_same_box(const MultiSeries& o) const;

  Degrees caps_;
  std::vector<std::size_t> strides_;
  std::vector<CDual> coeffs_;
};

inline MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
inline MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
inline MultiSeries operator*(MultiSeries a, const CDual& k) { return a *= k; }
inline MultiSeries operator*(const CDual& k, MultiSeries a) { return a *= k; }
inline MultiSeries operator+(MultiSeries a, const CDual& k) { return a += k; }

MultiSeries series_from_poly(std::size_t arity, Degrees caps,
                             const std::vector<std::pair<Degrees, CDual>>& terms);

/// exp(p) truncated to the caps of p. Requires a zero constant term.
MultiSeries series_exp(const MultiSeries& p);

/// Mixed partial derivative at the origin: coeff(orders) * prod(orders_i!).
CDual extract_mixed(const MultiSeries& p, const Degrees& orders);

// Floating-point factorial; orders above kMaxFactorial are rejected.
inline constexpr int kMaxFactorial = 34;
double factorial(int n);

}  // namespace su11
