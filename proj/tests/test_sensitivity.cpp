#include <cmath>
#include <numbers>

#include "doctest.h"
#include "su11/errors.hpp"
#include "su11/sensitivity.hpp"

using namespace su11;

TEST_CASE("reference values at g = 1, beta = 1, phi = 0.4") {
  const double expect[] = {0.265314, 0.196332, 0.164947, 0.145711};
  for (int m = 0; m <= 3; ++m) {
    Params p;
    p.m = m;
    const auto r = sensitivity_ideal(p);
    CHECK(r.delta_phi == doctest::Approx(expect[m]).epsilon(5e-6));
    CHECK(r.mean_N2 - r.mean_N * r.mean_N > 0.0);
  }
  Params p;
  p.g = p.beta = 0.5;
  p.phi = 1.0;
  p.m = 3;
  CHECK(sensitivity_ideal(p).delta_phi == doctest::Approx(0.5178110).epsilon(1e-6));
}

TEST_CASE("m = 0 has unit normalization and the coherent-state mean") {
  for (double phi : {0.2, 0.4, 1.0, 2.0}) {
    Params p;
    p.phi = phi;
    const auto r = sensitivity_ideal(p);
    CHECK(r.norm == 1.0);
    const double w2 = std::norm(kernels(p).w1.value);
    CHECK(r.mean_N == doctest::Approx(w2 * (1 + p.beta * p.beta)).epsilon(1e-13));
  }
}

TEST_CASE("dark fringe and stationary points raise errors") {
  for (int m = 1; m <= 3; ++m) {
    Params p;
    p.m = m;
    p.phi = 0.0;
    try {
      sensitivity_ideal(p);
      FAIL("expected a dark-fringe error");
    } catch (const NumericalError& e) {
      CHECK(e.code() == ErrorCode::DarkFringe);
    }
    CHECK_THROWS_AS(sensitivity_lossy(p), NumericalError);
  }
  // <N> is extremal at phi = pi
  Params p;
  p.phi = std::numbers::pi;
  try {
    sensitivity_ideal(p);
    FAIL("expected a stationary-point error");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::StationaryPoint);
  }
}

TEST_CASE("lossy reduces to ideal bit for bit") {
  for (int m = 0; m <= 4; ++m) {
    for (double phi : {0.1, 0.4, 1.3}) {
      Params p;
      p.m = m;
      p.phi = phi;
      const auto a = sensitivity_ideal(p), b = sensitivity_lossy(p);
      CHECK(a.delta_phi == b.delta_phi);
      CHECK(a.mean_N == b.mean_N);
      CHECK(a.mean_N2 == b.mean_N2);
    }
  }
}

TEST_CASE("internal loss hurts more than external loss") {
  Params in, ex;
  in.m = ex.m = 1;
  in.T1 = 0.7;
  ex.T2 = 0.7;
  CHECK(sensitivity_lossy(in).delta_phi > sensitivity_lossy(ex).delta_phi);
}

TEST_CASE("monotone improvement in m, beta and g") {
  for (double T : {1.0, 0.9}) {
    double prev = INFINITY;
    for (int m = 0; m <= 3; ++m) {
      Params p;
      p.m = m;
      p.T1 = T;
      const double d = sensitivity_lossy(p).delta_phi;
      CHECK(d < prev);
      prev = d;
    }
  }
  for (int m = 0; m <= 3; ++m) {
    double prev_b = INFINITY, prev_g = INFINITY;
    for (int i = 0; i < 16; ++i) {
      const double x = 0.5 + 1.5 * i / 15.0;
      Params pb, pg;
      pb.m = pg.m = m;
      pb.beta = x;
      pg.g = x;
      const double db = sensitivity_ideal(pb).delta_phi, dg = sensitivity_ideal(pg).delta_phi;
      CHECK(db < prev_b);
      CHECK(dg < prev_g);
      prev_b = db;
      prev_g = dg;
    }
  }
}

TEST_CASE("dual derivative agrees with the finite-difference fallback") {
  for (int m = 0; m <= 3; ++m) {
    Params p;
    p.m = m;
    p.T1 = 0.85;
    p.T2 = 0.9;
    for (bool lossy : {false, true}) {
      const auto a = lossy ? sensitivity_lossy(p) : sensitivity_ideal(p);
      const auto b = sensitivity_fd(p, lossy);
      CHECK(a.d_mean_dphi == doctest::Approx(b.d_mean_dphi).epsilon(1e-6));
    }
  }
}

TEST_CASE("optimal phase") {
  Params p;
  const auto opt = optimal_phase(p, 0.01, std::numbers::pi);
  CHECK(opt.phi < 0.01 + 0.1 * (std::numbers::pi - 0.01));
  CHECK(opt.delta_phi <= sensitivity_ideal(p).delta_phi);

  p.m = 1;
  const auto right = optimal_phase(p, 0.01, 1.0);
  const auto left = optimal_phase(p, -1.0, -0.01);
  CHECK(left.phi == doctest::Approx(-right.phi).epsilon(1e-6));
  CHECK(left.delta_phi == doctest::Approx(right.delta_phi).epsilon(1e-10));

  Params dark;
  dark.m = 2;
  dark.g = 0.0;  // w1 = 0 for every phi
  CHECK_THROWS_AS(optimal_phase(dark, 0.1, 1.0), NumericalError);
  CHECK_THROWS_AS(optimal_phase(p, 1.0, 0.5), ValidationError);
}
