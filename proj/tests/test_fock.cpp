#include <cmath>

#include "doctest.h"
#include "su11/errors.hpp"
#include "su11/fock.hpp"
#include "su11/limits.hpp"
#include "su11/qfi.hpp"
#include "su11/sensitivity.hpp"

using namespace su11;

namespace {

FockState vacuum(int n) {
  FockState s(n);
  s(0, 0) = 1.0;
  return s;
}

double max_diff(const FockState& a, const FockState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.amps().size(); ++i) d = std::max(d, std::abs(a.amps()[i] - b.amps()[i]));
  return d;
}

}  // namespace

TEST_CASE("input state") {
  const auto v = prepare_input(0.0, 10);
  CHECK(v(0, 0) == cplx(1.0));
  CHECK(v.norm2() == 1.0);

  const auto c = prepare_input(1.0, 20);
  CHECK(std::abs(c.norm2() - 1.0) < 1e-15);
  const auto mo = moments(BranchEnsemble(prepare_input(1.3, 40)), Mode::b);
  CHECK(mo.mean == doctest::Approx(1.69).epsilon(1e-13));
  CHECK(mo.second == doctest::Approx(1.69 + 1.69 * 1.69).epsilon(1e-13));

  try {
    prepare_input(3.0, 8);
    FAIL("expected a leakage error");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::Leakage);
  }
}

TEST_CASE("two-mode squeezer") {
  const auto in = prepare_input(1.0, 80);
  CHECK(max_diff(apply_tms(in, 0.0, 0.0), in) < 1e-15);

  for (double theta : {0.0, M_PI, 1.1}) {
    const auto tmsv = apply_tms(vacuum(80), 1.0, theta);
    CHECK(std::abs(tmsv.norm2() - 1.0) < 1e-12);
    CHECK(moments(BranchEnsemble(tmsv), Mode::a).mean == doctest::Approx(std::pow(std::sinh(1.0), 2)).epsilon(1e-12));
  }

  const auto s1 = apply_tms(in, 1.0, M_PI);
  CHECK(std::abs(s1.norm2() - 1.0) < 1e-12);
  CHECK(max_diff(apply_tms(s1, 1.0, 0.0), in) < 1e-12);

  // squeezing a coherent input into too small a box leaks
  CHECK_THROWS_AS(apply_tms(prepare_input(1.0, 20), 1.0, M_PI), NumericalError);
}

TEST_CASE("phase shifter") {
  const auto s = apply_tms(prepare_input(1.0, 80), 1.0, M_PI);
  CHECK(max_diff(apply_phase(s, 0.0), s) == 0.0);
  CHECK(max_diff(apply_phase(s, 2.0 * M_PI), s) < 1e-14);
  const double n0 = moments(BranchEnsemble(s), Mode::a).mean;
  CHECK(moments(BranchEnsemble(apply_phase(s, 0.7)), Mode::a).mean == doctest::Approx(n0).epsilon(1e-14));
}

TEST_CASE("loss channel") {
  const auto tmsv = apply_tms(vacuum(60), 1.0, M_PI);
  const BranchEnsemble e(tmsv);

  const auto same = apply_loss(e, 1.0, LossSite::internal);
  REQUIRE(same.branches.size() == 1);
  CHECK(max_diff(same.branches.front().state, tmsv) == 0.0);

  const auto lossy = apply_loss(e, 0.7, LossSite::internal);
  CHECK(std::abs(lossy.trace() - e.trace()) < 1e-12);
  CHECK(lossy.branches.size() <= 61u);
  CHECK(moments(lossy, Mode::a).mean ==
        doctest::Approx(0.7 * moments(e, Mode::a).mean).epsilon(1e-12));
  CHECK(moments(lossy, Mode::b).mean == doctest::Approx(moments(e, Mode::b).mean).epsilon(1e-12));

  // acting branch-wise commutes with forming mixtures
  const auto other = apply_tms(prepare_input(0.6, 60), 0.5, M_PI);
  BranchEnsemble mix(tmsv);
  mix.branches.push_back({other, {}});
  const auto lm = apply_loss(mix, 0.6, LossSite::external);
  const auto l1 = apply_loss(BranchEnsemble(tmsv), 0.6, LossSite::external);
  const auto l2 = apply_loss(BranchEnsemble(other), 0.6, LossSite::external);
  const double expect = (moments(l1, Mode::a).mean * l1.trace() + moments(l2, Mode::a).mean * l2.trace()) /
                        (l1.trace() + l2.trace());
  CHECK(moments(lm, Mode::a).mean == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(apply_loss(e, 0.0, LossSite::internal), ValidationError);
}

TEST_CASE("photon subtraction") {
  const auto in = BranchEnsemble(prepare_input(1.0, 30));
  const auto same = subtract_photons(in, 0);
  CHECK(same.success_probability == doctest::Approx(1.0).epsilon(1e-15));
  try {
    subtract_photons(in, 1);
    FAIL("expected a zero-probability error");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::ZeroProbability);
  }

  Params p;
  p.m = 2;
  const auto s1 = apply_tms(prepare_input(p.beta, 90), p.g, M_PI);
  const auto out = subtract_photons(BranchEnsemble(apply_tms(apply_phase(s1, p.phi), p.g, 0.0)), p.m);
  const double norm = sensitivity_ideal(p).norm;
  CHECK(out.success_probability == doctest::Approx(1.0 / (norm * norm)).epsilon(1e-9));
  CHECK(std::abs(out.trace() - 1.0) < 1e-12);
}

TEST_CASE("moments") {
  const auto v = moments(BranchEnsemble(vacuum(5)), Mode::a);
  CHECK(v.mean == 0.0);
  CHECK(v.second == 0.0);
}

TEST_CASE("oracle agrees with the analytic sensitivity") {
  for (int m = 0; m <= 2; ++m) {
    Params p;
    p.m = m;
    const auto o = numeric_sensitivity(p);
    const auto a = sensitivity_ideal(p);
    CHECK(o.rel_change < 1e-8);
    CHECK(o.mean_N == doctest::Approx(a.mean_N).epsilon(1e-8));
    CHECK(o.mean_N2 == doctest::Approx(a.mean_N2).epsilon(1e-8));
    CHECK(o.delta_phi == doctest::Approx(a.delta_phi).epsilon(1e-6));
  }
  Params p;
  p.m = 2;
  p.T1 = 0.8;
  CHECK(numeric_sensitivity(p).delta_phi == doctest::Approx(sensitivity_lossy(p).delta_phi).epsilon(1e-6));
}

TEST_CASE("port a beats port b") {
  for (int m = 0; m <= 2; ++m) {
    Params p;
    p.m = m;
    CHECK(numeric_sensitivity(p, Mode::a).delta_phi < numeric_sensitivity(p, Mode::b).delta_phi);
  }
}

TEST_CASE("finite-difference step stability") {
  Params p;
  p.m = 1;
  const double a = numeric_sensitivity_at(p, Mode::a, 1e-4, 80).delta_phi;
  const double b = numeric_sensitivity_at(p, Mode::a, 5e-5, 80).delta_phi;
  CHECK(std::abs(a - b) < 1e-7 * a);
  CHECK_THROWS_AS(numeric_sensitivity_at(p, Mode::a, 1e-2, 80), ValidationError);
}

TEST_CASE("oracle QFI") {
  Params p;
  p.g = 0.0;
  p.beta = 0.0;
  CHECK(numeric_qfi_pure(p).value == 0.0);

  p = Params{};
  p.m = 1;
  const auto o = numeric_qfi_pure(p);
  CHECK(o.value == doctest::Approx(qfi_ideal(p).F).epsilon(1e-5));
  const double half = numeric_qfi_pure_at(p, 2e-3, o.n_cut);
  CHECK(std::abs(half - o.value) < 1e-6 * o.value);

  p.T1 = 0.9;
  CHECK_THROWS_AS(numeric_qfi_pure(p), ValidationError);
}

TEST_CASE("oracle internal photon number") {
  Params p;
  p.beta = 0.0;
  CHECK(numeric_internal_photon_number(p).value ==
        doctest::Approx(2.0 * std::pow(std::sinh(1.0), 2)).epsilon(1e-8));
  p = Params{};
  p.m = 1;
  p.T1 = 0.8;
  CHECK(numeric_internal_photon_number(p).value == doctest::Approx(internal_photon_number(p)).epsilon(1e-6));
}

TEST_CASE("n_cut search gives up at the cap") {
  Params p;
  p.m = 3;
  OracleOptions opt;
  opt.n_cut_start = 30;
  opt.n_cut_cap = 40;
  try {
    numeric_sensitivity(p, Mode::a, 1e-4, opt);
    FAIL("expected non-convergence");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}
