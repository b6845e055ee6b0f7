#include "su11/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>

#include "parallel.hpp"
#include "su11/errors.hpp"
#include "su11/fock.hpp"
#include "su11/limits.hpp"
#include "su11/qfi.hpp"
#include "su11/sensitivity.hpp"
#include "su11/sweep.hpp"

namespace su11 {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every oracle number produced during a run, for the convergence criterion.
struct OracleTally {
  std::mutex mu;
  int count = 0;
  int converged = 0;
  double worst = 0.0;

  void add(double rel_change, double tol) {
    std::lock_guard<std::mutex> lock(mu);
    ++count;
    if (rel_change < tol) ++converged;
    worst = std::max(worst, rel_change);
  }
};

struct Context {
  VerifyLevel level;
  int threads;
  OracleTally tally;
  OracleOptions oracle;
  int m_max;
};

using Criterion = std::function<void(Context&, CriterionResult&)>;

void sensitivity_oracle(Context& ctx, CriterionResult& r) {
  struct Point {
    Params p;
  };
  std::vector<Point> grid;
  const std::pair<double, double> losses[] = {{1.0, 1.0}, {0.8, 1.0}, {1.0, 0.8}};
  for (int m = 0; m <= ctx.m_max; ++m) {
    for (double g : {0.5, 1.0}) {
      for (double beta : {0.5, 1.0}) {
        for (double phi : {0.2, 0.4, 1.0}) {
          for (auto [t1, t2] : losses) {
            Params p;
            p.m = m;
            p.g = g;
            p.beta = beta;
            p.phi = phi;
            p.T1 = t1;
            p.T2 = t2;
            grid.push_back({p});
          }
        }
      }
    }
  }
  std::vector<double> err(grid.size());
  const auto t0 = std::chrono::steady_clock::now();
  detail::parallel_for(static_cast<int>(grid.size()), ctx.threads, [&](int i) {
    const Params& p = grid[i].p;
    const auto a = sensitivity_lossy(p);
    const auto o = numeric_sensitivity(p, Mode::a, 1e-4, ctx.oracle);
    ctx.tally.add(o.rel_change, ctx.oracle.tolerance);
    err[i] = std::max({rel(a.mean_N, o.mean_N), rel(a.mean_N2, o.mean_N2),
                       rel(a.delta_phi, o.delta_phi)});
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.measured = *std::max_element(err.begin(), err.end());
  r.tolerance = 1e-6;
  r.passed = r.measured <= r.tolerance && secs < 600.0;
  r.detail = std::to_string(grid.size()) + " points, m <= " + std::to_string(ctx.m_max) +
             ", <N>, <N^2>, delta_phi vs Fock oracle; grid time " + fmt("%.1f", secs) +
             " s (limit 600 s)";
}

void qfi_oracle(Context& ctx, CriterionResult& r) {
  std::vector<Params> grid;
  for (int m = 0; m <= 2; ++m) {
    for (double g : {0.5, 1.0}) {
      for (double beta : {0.5, 1.0}) {
        Params p;
        p.m = m;
        p.g = g;
        p.beta = beta;
        grid.push_back(p);
      }
    }
  }
  std::vector<double> err(grid.size());
  detail::parallel_for(static_cast<int>(grid.size()), ctx.threads, [&](int i) {
    const auto o = numeric_qfi_pure(grid[i], 4e-3, ctx.oracle);
    ctx.tally.add(o.rel_change, ctx.oracle.tolerance);
    err[i] = rel(qfi_ideal(grid[i]).F, o.value);
  });
  r.measured = *std::max_element(err.begin(), err.end());
  r.tolerance = 1e-5;
  r.passed = r.measured <= r.tolerance;
  r.detail = std::to_string(grid.size()) + " points at phi = 0.4, fidelity-based oracle QFI";
}

void lossy_minimum(Context&, CriterionResult& r) {
  double worst = 0.0, worst_ideal = 0.0;
  bool flags = true;
  for (double eta : {0.5, 0.7, 0.9, 1.0}) {
    for (int m = 0; m <= 3; ++m) {
      Params p;
      p.m = m;
      p.eta = eta;
      const auto q = qfi_lossy(p);
      flags = flags && q.consistent;
      worst = std::max(worst, rel(q.F_closed, q.F_numeric));
      if (eta == 1.0) {
        const double ideal = qfi_ideal(p).F;
        worst_ideal = std::max({worst_ideal, rel(q.F_closed, ideal), rel(q.F_numeric, ideal)});
      }
    }
  }
  r.measured = worst;
  r.tolerance = 1e-8;
  r.passed = flags && worst <= 1e-8 && worst_ideal <= 1e-10;
  r.detail = "closed form vs alpha minimum over eta in {0.5,0.7,0.9,1}, m <= 3; at eta = 1 vs ideal QFI: " +
             fmt("%.2e", worst_ideal) + " (tolerance 1e-10)";
}

void reductions(Context&, CriterionResult& r) {
  double worst = 0.0;
  for (int m = 0; m <= 4; ++m) {
    for (double g : {0.3, 1.0, 1.7}) {
      for (double phi : {0.1, 0.4, 1.0, 2.2}) {
        Params p;
        p.m = m;
        p.g = g;
        p.phi = phi;
        const auto a = sensitivity_ideal(p), b = sensitivity_lossy(p);
        worst = std::max({worst, rel(b.delta_phi, a.delta_phi), rel(b.mean_N, a.mean_N),
                          rel(b.mean_N2, a.mean_N2)});
      }
    }
  }
  bool unit_norm = true;
  for (double phi : {0.1, 0.4, 1.0, 2.2}) {
    Params p;
    p.phi = phi;
    unit_norm = unit_norm && sensitivity_ideal(p).norm == 1.0 && sensitivity_lossy(p).norm == 1.0;
  }
  int dark_ok = 0, dark_total = 0;
  for (int m = 1; m <= 3; ++m) {
    Params p;
    p.m = m;
    p.phi = 0.0;
    const std::function<double()> calls[] = {
        [&] { return sensitivity_ideal(p).delta_phi; },
        [&] { return sensitivity_lossy(p).delta_phi; },
        [&] { return qfi_ideal(p).F; },
        [&] { return internal_photon_number(p); },
    };
    for (const auto& call : calls) {
      ++dark_total;
      try {
        (void)call();
      } catch (const NumericalError& e) {
        if (e.code() == ErrorCode::DarkFringe) ++dark_ok;
      }
    }
  }
  r.measured = worst;
  r.tolerance = 1e-14;
  r.passed = worst <= 1e-14 && unit_norm && dark_ok == dark_total;
  r.detail = std::string("lossy(T1=T2=1) vs ideal; N1 == 1 at m = 0: ") + (unit_norm ? "yes" : "no") +
             "; dark-fringe errors raised " + std::to_string(dark_ok) + "/" +
             std::to_string(dark_total);
}

template <class F>
bool strictly_increasing_in_m(F&& f) {
  double prev = -INFINITY;
  for (int m = 0; m <= 3; ++m) {
    const double v = f(m);
    if (!(v > prev)) return false;
    prev = v;
  }
  return true;
}

void orderings(Context&, CriterionResult& r) {
  auto at = [](int m) {
    Params p;
    p.m = m;
    return p;
  };
  const bool dphi = strictly_increasing_in_m([&](int m) { return -sensitivity_ideal(at(m)).delta_phi; });
  bool placement = true;
  double min_gap = INFINITY;
  std::string crossings;
  for (int m = 0; m <= 3; ++m) {
    auto gap = [&](double T) {
      Params in = at(m), ex = at(m);
      in.T1 = T;
      ex.T2 = T;
      return sensitivity_lossy(in).delta_phi - sensitivity_lossy(ex).delta_phi;
    };
    double first_bad = -1.0;
    for (int i = 0; i <= 11; ++i) {
      const double T = 0.4 + 0.05 * i;
      const double d = gap(T);
      min_gap = std::min(min_gap, d);
      if (!(d > 0.0) && first_bad < 0.0) first_bad = T;
    }
    if (first_bad > 0.0) {
      placement = false;
      double lo = first_bad - 0.05, hi = first_bad;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
      }
      crossings += " m=" + std::to_string(m) + " at T=" + fmt("%.4f", lo) + ";";
    }
  }
  const bool F = strictly_increasing_in_m([&](int m) { return qfi_ideal(at(m)).F; });
  bool FL = true, NT = true;
  for (double T : {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    FL = FL && strictly_increasing_in_m([&](int m) {
           Params p = at(m);
           p.eta = T;
           return qfi_lossy(p).F;
         });
    NT = NT && strictly_increasing_in_m([&](int m) {
           Params p = at(m);
           p.T1 = T;
           return internal_photon_number(p);
         });
  }
  r.measured = min_gap;
  r.tolerance = 0.0;
  r.passed = dphi && placement && F && FL && NT;
  auto yn = [](bool b) { return b ? "ok" : "VIOLATED"; };
  r.detail = std::string("delta_phi down in m: ") + yn(dphi) + "; internal > external loss (T 0.4..0.95): " +
             yn(placement) + "; F up in m: " + yn(F) + "; F_L up in m (T 0.4..1): " + yn(FL) +
             "; N_T up in m: " + yn(NT) + "; measured = smallest internal-external gap";
  if (!crossings.empty()) r.detail += "; internal and external curves cross:" + crossings;
}

void sql_beating(Context&, CriterionResult& r) {
  int smallest = -1;
  double margin = 0.0;
  std::string rows;
  for (int m = 1; m <= 3; ++m) {
    Params p;
    p.m = m;
    p.T1 = 0.6;
    const double d = sensitivity_lossy(p).delta_phi, sql = limits(p).sql;
    rows += " m=" + std::to_string(m) + ": " + fmt("%.6f", d) + " vs SQL " + fmt("%.6f", sql) + ";";
    if (d < sql && smallest < 0) {
      smallest = m;
      margin = sql - d;
    }
  }
  r.measured = margin;
  r.tolerance = 0.0;
  r.passed = smallest > 0;
  r.detail = "T = 0.6, smallest m with delta_phi_L < SQL: " +
             (smallest > 0 ? std::to_string(smallest) : std::string("none")) + ";" + rows;
}

void bound_ordering(Context&, CriterionResult& r) {
  double min_gap = INFINITY;
  int points = 0;
  for (int m = 0; m <= 3; ++m) {
    for (int ib = 0; ib < 7; ++ib) {
      for (int ig = 0; ig < 7; ++ig) {
        for (double phi : {0.2, 0.4, 1.0}) {
          Params p;
          p.m = m;
          p.beta = 0.5 + 0.25 * ib;
          p.g = 0.5 + 0.25 * ig;
          p.phi = phi;
          const double d = sensitivity_ideal(p).delta_phi, q = qfi_ideal(p).qcrb;
          min_gap = std::min(min_gap, (d - q) / q);
          ++points;
        }
      }
    }
  }
  r.measured = min_gap;
  r.tolerance = 0.0;
  r.passed = min_gap > 0.0;
  r.detail = std::to_string(points) +
             " ideal points (beta, g in [0.5, 2], phi in {0.2, 0.4, 1}); measured = smallest (delta_phi - QCRB)/QCRB";
}

void loss_severity(Context&, CriterionResult& r) {
  auto ratio = [](double beta) {
    Params p;
    p.beta = beta;
    p.eta = 0.7;
    return qfi_lossy(p).F / qfi_ideal(p).F;
  };
  constexpr int n = 151;
  std::vector<double> b(n), v(n);
  for (int i = 0; i < n; ++i) {
    b[i] = 0.5 + 1.5 * i / (n - 1);
    v[i] = ratio(b[i]);
  }
  auto crossing = [&](double lo, double hi) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((ratio(mid) < 0.5) == (ratio(lo) < 0.5) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (v[i] < 0.5) {
      if (first < 0) first = i;
      last = i;
    } else if (first >= 0) {
      break;
    }
  }
  r.tolerance = 0.5;
  r.measured = *std::min_element(v.begin(), v.end());
  r.passed = first >= 0;
  if (!r.passed) {
    r.detail = "F_L/F >= 0.5 everywhere on beta in [0.5, 2]";
    return;
  }
  const double lo = first == 0 ? b[0] : crossing(b[first - 1], b[first]);
  const double hi = last == n - 1 ? b[n - 1] : crossing(b[last], b[last + 1]);
  r.detail = "eta = 0.7, g = 1, phi = 0.4, m = 0: F_L < 0.5 F on beta in [" + fmt("%.6g", lo) + ", " +
             fmt("%.6g", hi) + "]" + (first == 0 && last == n - 1 ? " (the whole scanned range)" : "") +
             "; measured = smallest F_L/F";
}

void hygiene(Context& ctx, CriterionResult& r) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> ug(0.3, 1.5), ub(0.2, 1.5), uphi(0.15, 2.5), uT(0.5, 1.0);
  std::uniform_int_distribution<int> um(0, 4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Params p;
    p.g = ug(rng);
    p.beta = ub(rng);
    p.phi = uphi(rng);
    p.m = um(rng);
    p.T1 = uT(rng);
    p.T2 = uT(rng);
    for (bool lossy : {false, true}) {
      const double dual = (lossy ? sensitivity_lossy(p) : sensitivity_ideal(p)).d_mean_dphi;
      worst = std::max(worst, rel(dual, sensitivity_fd(p, lossy, 1e-5).d_mean_dphi));
    }
  }
  if (ctx.tally.count == 0) {
    for (int m = 0; m <= 2; ++m) {
      Params p;
      p.m = m;
      p.T1 = 0.9;
      ctx.tally.add(numeric_sensitivity(p, Mode::a, 1e-4, ctx.oracle).rel_change, ctx.oracle.tolerance);
    }
  }
  r.measured = worst;
  r.tolerance = 1e-6;
  r.passed = worst <= 1e-6 && ctx.tally.converged == ctx.tally.count;
  r.detail = "100 random points, dual vs central difference (step 1e-5); oracle values converged in n_cut: " +
             std::to_string(ctx.tally.converged) + "/" + std::to_string(ctx.tally.count) +
             " (worst n_cut vs n_cut-5 change " + fmt("%.2e", ctx.tally.worst) + ")";
}

}  // namespace

std::vector<CriterionResult> run_verify(const VerifyOptions& opt) {
  Context ctx;
  ctx.level = opt.level;
  ctx.threads = opt.threads > 0 ? opt.threads : thread_count_from_env();
  ctx.m_max = opt.level == VerifyLevel::fast ? 2 : 3;
  ctx.oracle.n_cut_start = opt.level == VerifyLevel::fast ? 25 : 30;

  const std::pair<const char*, Criterion> all[] = {
      {"oracle_sensitivity", sensitivity_oracle},
      {"oracle_qfi", qfi_oracle},
      {"lossy_qfi_minimum", lossy_minimum},
      {"reduction_identities", reductions},
      {"orderings", orderings},
      {"sql_beating", sql_beating},
      {"bound_ordering", bound_ordering},
      {"qfi_loss_severity", loss_severity},
      {"numerical_hygiene", hygiene},
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult r;
    r.id = id;
    r.name = all[id - 1].first;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      all[id - 1].second(ctx, r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %d %s measured=%.6g tolerance=%.3g time=%.2fs | ",
                r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.tolerance, r.seconds);
  return buf + r.detail;
}

}  // namespace su11
