#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "su11/errors.hpp"
#include "su11/sensitivity.hpp"
#include "su11/sweep.hpp"

using namespace su11;

namespace {

const char* kConfig = R"(# two sweeps
[phase]
quantity = delta_phi_ideal, qfi_ideal
axis = phi
lo = 0.1
hi = 0.9
points = 2
m = 0, 1

[loss]
quantity = delta_phi_lossy
axis = T1   # internal loss
lo = 0.5
hi = 1
points = 3
m = 2
phi = 0.4
)";

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config round trip is the identity") {
  const auto specs = parse_config(kConfig);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "phase");
  CHECK(specs[0].quantities.size() == 2);
  CHECK(specs[0].m_list == std::vector<int>{0, 1});
  CHECK(specs[1].axis.param == "T1");
  CHECK(specs[1].fixed.phi == 0.4);

  const std::string text = serialize_config(specs);
  const auto again = parse_config(text);
  CHECK(again == specs);
  CHECK(serialize_config(again) == text);
}

TEST_CASE("round trip keeps every bit of awkward doubles") {
  SweepSpec s;
  s.name = "bits";
  s.quantities = {Quantity::qfi_lossy};
  s.axis = {"eta", 0.1 + 0.2, 1.0 / 3.0 + 0.5, 7};
  s.fixed.g = std::nextafter(1.0, 2.0);
  s.fixed.beta = 1e-7 / 3.0;
  s.fixed.alpha = -0.7;
  const auto back = parse_config(serialize_config({s}));
  REQUIRE(back.size() == 1);
  CHECK(back[0] == s);
}

TEST_CASE("config errors carry line numbers") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      INFO(msg);
      CHECK(msg.find(needle) != std::string::npos);
      return;
    }
    FAIL("no ValidationError for: " << text);
  };
  fails_with("[a]\nquantity = qfi_ideal\nquantity = qfi_ideal\n", "line 3");
  fails_with("[a]\nbogus = 1\n", "unknown key 'bogus'");
  fails_with("[a]\nquantity = qfi_ideal\naxis = phi\nlo = 0\nhi = 1\n", "missing key 'points'");
  fails_with("[a]\nquantity = nothing\n", "unknown quantity");
  fails_with("[a]\nquantity = qfi_ideal\naxis = phi\nlo = 0\nhi = x\npoints = 2\n", "line 5");
  fails_with("quantity = qfi_ideal\n", "outside of a section");
  fails_with("[a]\nquantity = sql\naxis = phi\nlo = 0.1\nhi = 1\npoints = 2\nT2 = 0.5\n", "T2 = 1");
  fails_with("[a]\nquantity = qfi_ideal\naxis = g\nlo = 1\nhi = 0.5\npoints = 2\n", "lo < hi");
  fails_with("", "no sweep");
  CHECK_THROWS_AS(load_config("/nonexistent/su11.cfg"), ValidationError);
}

TEST_CASE("sweep rows are deterministic and complete") {
  const auto specs = parse_config(kConfig);
  const Table t1 = run_sweeps(specs, 1);
  const Table t4 = run_sweeps(specs, 4);
  CHECK(t1.size() == 2 * 2 * 2 + 3);
  REQUIRE(t1.size() == t4.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].series == t4[i].series);
    CHECK(t1[i].x == t4[i].x);
    CHECK(t1[i].m == t4[i].m);
    CHECK(t1[i].value == t4[i].value);
  }
  Params p;
  p.phi = 0.9;
  p.m = 1;
  bool found = false;
  for (const auto& r : t1)
    if (r.series == "phase" && r.m == 1 && r.x == 0.9 && r.quantity == Quantity::delta_phi_ideal) {
      CHECK(*r.value == sensitivity_ideal(p).delta_phi);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("two points per m") {
  const auto specs = parse_config(
      "[s]\nquantity = delta_phi_ideal\naxis = g\nlo = 0.5\nhi = 1\npoints = 2\nm = 0, 1, 2\n");
  const Table t = run_sweeps(specs, 2);
  REQUIRE(t.size() == 6);
  for (int m = 0; m <= 2; ++m) {
    int n = 0;
    for (const auto& r : t) n += r.m == m;
    CHECK(n == 2);
  }
}

TEST_CASE("singular points are reported by code, never NaN") {
  const auto specs = parse_config(
      "[s]\nquantity = delta_phi_ideal\naxis = phi\nlo = -1\nhi = 1\npoints = 3\nm = 1\n");
  const Table t = run_sweeps(specs, 1);
  REQUIRE(t.size() == 3);
  CHECK(t[0].value.has_value());
  CHECK(t[2].value.has_value());
  CHECK_FALSE(t[1].value.has_value());
  CHECK(t[1].error == "DarkFringe");

  std::ostringstream out;
  write_csv(out, t);
  const std::string csv = out.str();
  CHECK(csv.find("nan") == std::string::npos);
  CHECK(csv.find("NaN") == std::string::npos);
  CHECK(csv.find(",0,1,delta_phi_ideal,,DarkFringe\n") != std::string::npos);
}

TEST_CASE("CSV layout") {
  const auto specs = parse_config(kConfig);
  const Table t = run_sweeps(specs, 1);
  std::ostringstream out;
  write_csv(out, t);
  const std::string csv = out.str();
  CHECK(csv.rfind("series,axis,x,m,quantity,value,error\n", 0) == 0);
  CHECK(count_lines(csv) == static_cast<int>(t.size()) + 1);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("SU11_THREADS") {
  ::setenv("SU11_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  ::setenv("SU11_THREADS", "0", 1);
  CHECK_THROWS_AS(thread_count_from_env(), ValidationError);
  ::setenv("SU11_THREADS", "many", 1);
  CHECK_THROWS_AS(thread_count_from_env(), ValidationError);
  ::unsetenv("SU11_THREADS");
  CHECK(thread_count_from_env() >= 1);
}

TEST_CASE("figures") {
  const auto ids = figure_ids();
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
  for (const auto& id : ids) {
    INFO(id);
    const auto specs = figure_specs(id);
    CHECK_FALSE(specs.empty());
    for (const auto& s : specs) CHECK_NOTHROW(s.validate());
  }
  CHECK_THROWS_AS(figure_specs("fig99"), ValidationError);

  const auto fig5 = figure_specs("fig5");
  std::set<std::string> axes;
  for (const auto& s : fig5) axes.insert(s.axis.param);
  CHECK(axes.count("T1") == 1);
  CHECK(axes.count("T2") == 1);

  const Table t = run_figure("fig13a", 1);
  CHECK_FALSE(t.empty());
  for (const auto& r : t) CHECK(r.value.has_value());
}
