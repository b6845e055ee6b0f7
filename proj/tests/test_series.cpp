#include <cmath>
#include <random>

#include "doctest.h"
#include "su11/errors.hpp"
#include "su11/model.hpp"
#include "su11/series.hpp"

using namespace su11;

namespace {

std::mt19937_64 rng(20240611);

cplx rand_c(double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

CDual rand_d(double scale = 1.0) { return {rand_c(scale), rand_c(scale)}; }

// Random polynomial of total degree <= 2 with zero constant term.
MultiSeries rand_quadratic(const Degrees& caps, double scale = 0.5) {
  MultiSeries out(caps);
  const int n = static_cast<int>(caps.size());
  for (int i = 0; i < n; ++i) {
    out += MultiSeries::variable(caps, i, rand_d(scale));
    for (int j = i; j < n; ++j) {
      out += MultiSeries::variable(caps, i, rand_d(scale)) * MultiSeries::variable(caps, j);
    }
  }
  return out;
}

MultiSeries rand_series(const Degrees& caps) {
  MultiSeries out(caps);
  for (std::size_t f = 0; f < out.size(); ++f) {
    out += series_from_poly(caps.size(), caps, {{out.index_of(f), rand_d()}});
  }
  return out;
}

bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("CDual follows the product and quotient rules") {
  for (int i = 0; i < 50; ++i) {
    const CDual a = rand_d(), b = rand_d();
    const CDual p = a * b;
    CHECK(close(p.dphi, a.value * b.dphi + a.dphi * b.value, 1e-15));
    const CDual q = p / b;
    CHECK(close(q.value, a.value, 1e-12));
    CHECK(close(q.dphi, a.dphi, 1e-10));
  }
}

TEST_CASE("series_from_poly") {
  const auto one = series_from_poly(2, {1, 1}, {{{0, 0}, 1.0}});
  CHECK(one.constant_term() == CDual{1.0});
  CHECK(one.coeff({1, 1}) == CDual{});

  const CDual c{cplx(0.3, -0.2)};
  const auto st = series_from_poly(2, {1, 1}, {{{1, 1}, c}});
  CHECK(st.coeff({1, 1}) == c);
  CHECK(st.coeff({1, 0}) == CDual{});

  CHECK_THROWS_AS(series_from_poly(2, {1, 1}, {{{2, 0}, 1.0}}), ValidationError);
  CHECK_THROWS_AS(series_from_poly(2, {1, 1, 1}, {}), ValidationError);
}

TEST_CASE("F3 has eight nonzero terms") {
  Params p;
  p.m = 2;
  const auto B = exponents_B(p);
  int nonzero = 0;
  for (std::size_t f = 0; f < B.F3.size(); ++f) {
    if (B.F3.coeff(B.F3.index_of(f)).value != cplx{}) ++nonzero;
  }
  CHECK(nonzero == 8);
}

TEST_CASE("series_exp on simple inputs") {
  const Degrees caps{2, 2};
  const auto e0 = series_exp(MultiSeries(caps));
  CHECK(e0.constant_term() == CDual{1.0});
  CHECK(e0.coeff({1, 1}) == CDual{});

  const cplx c{0.7, 0.4};
  const auto e = series_exp(series_from_poly(2, caps, {{{1, 1}, c}}));
  CHECK(close(e.coeff({1, 1}).value, c, 1e-15));
  CHECK(close(e.coeff({2, 2}).value, c * c / 2.0, 1e-15));
  CHECK(e.coeff({1, 0}).value == cplx{});

  CHECK_THROWS_AS(series_exp(MultiSeries::constant(caps, 1.0)), ValidationError);
}

TEST_CASE("e^A1 low-order coefficient") {
  Params p;
  const auto k = kernels(p);
  const auto e = series_exp(exponent_A(p, false, {2, 2}));
  const double w2 = std::norm(k.w1.value);
  CHECK(close(e.coeff({1, 1}).value, w2 + w2 * p.beta * p.beta, 1e-14));
}

TEST_CASE("extract_mixed") {
  CHECK(extract_mixed(MultiSeries::constant({0, 0}, 1.0), {0, 0}) == CDual{1.0});
  const cplx c{-0.1, 0.9};
  const auto e = series_exp(series_from_poly(2, {2, 2}, {{{1, 1}, c}}));
  CHECK(close(extract_mixed(e, {1, 1}).value, c, 1e-15));
  CHECK(close(extract_mixed(e, {2, 2}).value, 2.0 * c * c, 1e-14));
  CHECK_THROWS_AS(extract_mixed(e, {3, 0}), ValidationError);

  const Degrees caps{2, 1, 1};
  const auto a = rand_series(caps), b = rand_series(caps);
  const CDual k = rand_d();
  const CDual lhs = extract_mixed(a * k + b, {2, 1, 0});
  const CDual rhs = extract_mixed(a, {2, 1, 0}) * k + extract_mixed(b, {2, 1, 0});
  CHECK(close(lhs.value, rhs.value, 1e-13));
  CHECK(close(lhs.dphi, rhs.dphi, 1e-13));
}

TEST_CASE("G_m matches the multinomial closed form") {
  for (int m = 0; m <= 4; ++m) {
    for (double beta : {0.0, 0.5, 1.0, 1.7}) {
      Params p;
      p.m = m;
      p.beta = beta;
      const double w2 = std::norm(kernels(p).w1.value);
      double expect = 0.0;
      for (int j = 0; j <= m; ++j) {
        expect += std::pow(factorial(m), 2) * std::pow(w2, j) * std::pow(w2 * beta * beta, m - j) /
                  (factorial(j) * std::pow(factorial(m - j), 2));
      }
      const cplx got = extract_mixed(series_exp(exponent_A(p, false, {m, m})), {m, m}).value;
      CHECK(close(got, expect, 1e-12 * std::max(1.0, expect)));
    }
  }
}

TEST_CASE("exp(p) exp(q) = exp(p + q)") {
  for (const Degrees& caps : {Degrees{3, 3}, Degrees{2, 2, 1, 1}, Degrees{1, 1, 1, 1, 1, 1}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = rand_quadratic(caps), q = rand_quadratic(caps);
      CHECK((series_exp(p) * series_exp(q)).approx_equal(series_exp(p + q), 1e-12));
    }
  }
}

TEST_CASE("products are commutative and associative") {
  const Degrees caps{2, 3, 1};
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = rand_series(caps), b = rand_series(caps), c = rand_series(caps);
    CHECK((a * b).approx_equal(b * a, 1e-12));
    CHECK(((a * b) * c).approx_equal(a * (b * c), 1e-11));
    CHECK(((a + b) + c).approx_equal(a + (b + c), 1e-14));
  }
}

TEST_CASE("raising caps never changes retained coefficients") {
  Params p;
  p.m = 2;
  const auto small = series_exp(exponent_A(p, true, {2, 2}));
  const auto big = series_exp(exponent_A(p, true, {4, 5}));
  for (std::size_t f = 0; f < small.size(); ++f) {
    const Degrees idx = small.index_of(f);
    CHECK(close(small.coeff(idx).value, big.coeff(idx).value, 1e-15));
    CHECK(close(small.coeff(idx).dphi, big.coeff(idx).dphi, 1e-15));
  }
}

TEST_CASE("dual channel of the A1 pipeline matches finite differences") {
  const double h = 1e-6;
  for (int m = 0; m <= 3; ++m) {
    Params p;
    p.m = m;
    p.phi = 0.7;
    auto G = [&](double phi) {
      Params q = p;
      q.phi = phi;
      return extract_mixed(series_exp(exponent_A(q, false, {m + 1, m + 1})), {m + 1, m + 1});
    };
    const cplx fd = (G(p.phi + h).value - G(p.phi - h).value) / (2.0 * h);
    CHECK(std::abs(G(p.phi).dphi - fd) <= 1e-6 * std::abs(fd));
  }
}

TEST_CASE("factorial guard") {
  CHECK(factorial(0) == 1.0);
  CHECK(factorial(10) == 3628800.0);
  CHECK_THROWS_AS(factorial(kMaxFactorial + 1), ValidationError);
  CHECK_THROWS_AS(factorial(-1), ValidationError);
}
