#include "su11/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <list>
#include <mutex>
#include <optional>
#include <string>

#include "su11/errors.hpp"

namespace su11 {

namespace {

// Success probabilities below this fraction of the pre-subtraction trace are
// indistinguishable from rounding noise in the amplitudes.
constexpr double kZeroProbability = 1e-24;
constexpr double kBranchCutoff = 1e-18;
constexpr double kInputTail = 1e-14;

void check_same_size(const FockState& a, const FockState& b) {
  if (a.n_cut() != b.n_cut()) throw ValidationError("Fock states with different n_cut");
}

cplx inner(const FockState& a, const FockState& b) {
  check_same_size(a, b);
  cplx s{};
  for (std::size_t i = 0; i < a.amps().size(); ++i) s += std::conj(a.amps()[i]) * b.amps()[i];
  return s;
}

FockState lower_a(const FockState& s) {
  FockState out(s.n_cut());
  for (int na = 0; na < s.n_cut(); ++na) {
    const double f = std::sqrt(na + 1.0);
    for (int nb = 0; nb <= s.n_cut(); ++nb) out(na, nb) = f * s(na + 1, nb);
  }
  return out;
}

void check_leakage(double leak, int n_cut, const char* where) {
  if (leak > kLeakageTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "truncation leakage after %s at n_cut %d: %.3g", where, n_cut,
                  leak);
    throw NumericalError(ErrorCode::Leakage, buf);
  }
}

double top_layer_mass(const FockState& s) {
  const int N = s.n_cut();
  double top = 0.0;
  for (int na = 0; na <= N; ++na) {
    for (int nb = 0; nb <= N; ++nb) {
      if (na >= N - 1 || nb >= N - 1) top += std::norm(s(na, nb));
    }
  }
  return top;
}

}  // namespace

FockState::FockState(int n_cut) : n_cut_(n_cut) {
  if (n_cut < 2) throw ValidationError("n_cut must be at least 2");
  amps_.assign(static_cast<std::size_t>(dim()) * dim(), cplx{});
}

double FockState::norm2() const {
  double s = 0.0;
  for (const cplx& a : amps_) s += std::norm(a);
  return s;
}

double FockState::leakage() const {
  const double total = norm2();
  return total == 0.0 ? 0.0 : top_layer_mass(*this) / total;
}

void FockState::normalize() {
  const double n = std::sqrt(norm2());
  if (!(n > 0.0)) throw NumericalError(ErrorCode::ZeroProbability, "cannot normalize a zero state");
  for (cplx& a : amps_) a /= n;
  normalized = true;
}

double BranchEnsemble::trace() const {
  double t = 0.0;
  for (const auto& b : branches) t += b.state.norm2();
  return t;
}

double BranchEnsemble::leakage() const {
  const double total = trace();
  if (total == 0.0) return 0.0;
  double top = 0.0;
  for (const auto& b : branches) top += top_layer_mass(b.state);
  return top / total;
}

FockState prepare_input(double beta, int n_cut) {
  if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
  FockState s(n_cut);
  const double b2 = beta * beta;
  // Poisson weights in log space; the tail beyond n_cut is summed explicitly.
  auto log_weight = [&](int n) {
    return n == 0 ? -b2 : -b2 + n * std::log(b2) - std::lgamma(n + 1.0);
  };
  for (int n = 0; n <= n_cut; ++n) {
    s(0, n) = beta == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(0.5 * log_weight(n));
  }
  double tail = 0.0;
  if (beta > 0.0) {
    for (int n = n_cut + 1;; ++n) {
      const double w = std::exp(log_weight(n));
      tail += w;
      if (n > b2 && w < 1e-3 * kInputTail) break;
    }
  }
  if (tail > kInputTail) {
    throw NumericalError(ErrorCode::Leakage, "coherent tail beyond n_cut " + std::to_string(n_cut) +
                                                 " is " + std::to_string(tail));
  }
  s.normalized = true;
  return s;
}

struct TwoModeSqueezer::Sectors {
  // Sector d = n_a - n_b lives at index d + n_cut.
  std::vector<Eigen::MatrixXd> vectors;
  std::vector<Eigen::VectorXd> values;
};

TwoModeSqueezer::TwoModeSqueezer(double g, int n_cut)
    : g_(g), n_cut_(n_cut), sectors_(std::make_unique<Sectors>()) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("squeezing gain must be >= 0");
  if (n_cut < 2) throw ValidationError("n_cut must be at least 2");
  sectors_->vectors.resize(2 * n_cut + 1);
  sectors_->values.resize(2 * n_cut + 1);
  for (int d = -n_cut; d <= n_cut; ++d) {
    const int len = n_cut + 1 - std::abs(d);
    const int na0 = std::max(d, 0), nb0 = std::max(-d, 0);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(len);
    Eigen::VectorXd sub(std::max(len - 1, 0));
    for (int k = 0; k + 1 < len; ++k) sub[k] = g * std::sqrt((na0 + k + 1.0) * (nb0 + k + 1.0));
    auto& V = sectors_->vectors[d + n_cut];
    auto& L = sectors_->values[d + n_cut];
    if (len == 1) {
      V = Eigen::MatrixXd::Identity(1, 1);
      L = Eigen::VectorXd::Zero(1);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
      throw NumericalError(ErrorCode::NotConverged, "squeezer eigendecomposition failed");
    }
    V = es.eigenvectors();
    L = es.eigenvalues();
  }
}

TwoModeSqueezer::~TwoModeSqueezer() = default;

FockState TwoModeSqueezer::apply(const FockState& in, double theta) const {
  if (in.n_cut() != n_cut_) throw ValidationError("squeezer and state differ in n_cut");
  // i*K has off-diagonal c*s_k with c = i g e^{i theta}; conjugating by
  // diag(u^k), u = -i e^{-i theta}, leaves g*s_k.
  const double arg_u = -0.5 * M_PI - theta;
  FockState out(n_cut_);
  Eigen::VectorXcd z, w;
  for (int d = -n_cut_; d <= n_cut_; ++d) {
    const int len = n_cut_ + 1 - std::abs(d);
    const int na0 = std::max(d, 0), nb0 = std::max(-d, 0);
    const auto& V = sectors_->vectors[d + n_cut_];
    const auto& L = sectors_->values[d + n_cut_];
    z.resize(len);
    for (int k = 0; k < len; ++k) z[k] = std::polar(1.0, -k * arg_u) * in(na0 + k, nb0 + k);
    w = V.transpose() * z;
    for (int k = 0; k < len; ++k) w[k] *= std::polar(1.0, -L[k]);
    z = V * w;
    for (int k = 0; k < len; ++k) out(na0 + k, nb0 + k) = std::polar(1.0, k * arg_u) * z[k];
  }
  out.normalized = in.normalized;
  return out;
}

std::shared_ptr<const TwoModeSqueezer> TwoModeSqueezer::cached(double g, int n_cut) {
  struct Entry {
    double g;
    int n_cut;
    std::shared_ptr<const TwoModeSqueezer> sq;
    std::size_t bytes;
  };
  static std::mutex mu;
  static std::list<Entry> lru;
  static std::size_t total = 0;
  constexpr std::size_t kBudget = std::size_t{256} << 20;

  {
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = lru.begin(); it != lru.end(); ++it) {
      if (it->g == g && it->n_cut == n_cut) {
        lru.splice(lru.begin(), lru, it);
        return lru.front().sq;
      }
    }
  }
  auto sq = std::make_shared<const TwoModeSqueezer>(g, n_cut);
  std::size_t bytes = 0;
  for (int d = -n_cut; d <= n_cut; ++d) {
    const std::size_t len = n_cut + 1 - std::abs(d);
    bytes += len * (len + 1) * sizeof(double);
  }
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& e : lru) {
    if (e.g == g && e.n_cut == n_cut) return e.sq;  // built concurrently
  }
  lru.push_front({g, n_cut, sq, bytes});
  total += bytes;
  while (total > kBudget && lru.size() > 1) {
    total -= lru.back().bytes;
    lru.pop_back();
  }
  return sq;
}

FockState apply_tms(const FockState& in, double g, double theta, bool check) {
  FockState out = TwoModeSqueezer::cached(g, in.n_cut())->apply(in, theta);
  if (check) check_leakage(out.leakage(), out.n_cut(), "two-mode squeezing");
  return out;
}

FockState apply_phase(FockState s, double phi) {
  for (int na = 0; na <= s.n_cut(); ++na) {
    const cplx ph = std::polar(1.0, phi * na);
    for (int nb = 0; nb <= s.n_cut(); ++nb) s(na, nb) *= ph;
  }
  return s;
}

BranchEnsemble apply_loss(const BranchEnsemble& in, double T, LossSite site) {
  (void)site;  // both placements act on mode a; the site only labels the branch
  if (!(T > 0.0 && T <= 1.0)) throw ValidationError("loss transmittance must lie in (0, 1]");
  BranchEnsemble out;
  out.success_probability = in.success_probability;
  const double cutoff = kBranchCutoff * in.trace();
  for (const auto& br : in.branches) {
    if (T == 1.0) {
      out.branches.push_back(br);
      out.branches.back().origin.push_back(0);
      continue;
    }
    const int N = br.state.n_cut();
    std::vector<double> damp(N + 1);
    for (int n = 0; n <= N; ++n) damp[n] = std::pow(T, 0.5 * n);
    FockState cur = br.state;
    double coeff = 1.0;  // (1-T)^l / l!
    for (int l = 0; l <= N; ++l) {
      if (l > 0) {
        cur = lower_a(cur);
        coeff *= (1.0 - T) / l;
      }
      const double c = std::sqrt(coeff);
      FockState k(N);
      for (int na = 0; na <= N; ++na) {
        for (int nb = 0; nb <= N; ++nb) k(na, nb) = c * damp[na] * cur(na, nb);
      }
      const double w = k.norm2();
      if (w == 0.0 && cur.norm2() == 0.0) break;
      if (w > cutoff) {
        out.branches.push_back({std::move(k), br.origin});
        out.branches.back().origin.push_back(l);
      }
    }
  }
  return out;
}

BranchEnsemble subtract_photons(BranchEnsemble in, int m) {
  if (m < 0) throw ValidationError("subtraction count must be >= 0");
  const double before = in.trace();
  for (auto& br : in.branches) {
    for (int i = 0; i < m; ++i) br.state = lower_a(br.state);
  }
  const double after = in.trace();
  if (!(after > kZeroProbability * before) || !(after >= 1e-300)) {
    throw NumericalError(ErrorCode::ZeroProbability,
                         "photon subtraction never succeeds (m = " + std::to_string(m) + ")");
  }
  const double scale = 1.0 / std::sqrt(after);
  for (auto& br : in.branches) {
    for (cplx& a : br.state.amps()) a *= scale;
    br.state.normalized = false;
  }
  in.success_probability *= after;
  return in;
}

MomentPair moments(const BranchEnsemble& e, Mode mode) {
  double tr = 0.0, s1 = 0.0, s2 = 0.0;
  for (const auto& br : e.branches) {
    const FockState& s = br.state;
    for (int na = 0; na <= s.n_cut(); ++na) {
      for (int nb = 0; nb <= s.n_cut(); ++nb) {
        const double w = std::norm(s(na, nb));
        const double n = mode == Mode::a ? na : nb;
        tr += w;
        s1 += w * n;
        s2 += w * n * n;
      }
    }
  }
  if (!(tr > 0.0)) return {};
  return {s1 / tr, s2 / tr};
}

namespace {

FockState first_squeezer(const Params& p, int n_cut) {
  return apply_tms(prepare_input(p.beta, n_cut), p.g, M_PI);
}

BranchEnsemble output_ensemble(const FockState& s1, const Params& p, double phi) {
  BranchEnsemble e = apply_loss(BranchEnsemble(s1), p.T1, LossSite::internal);
  for (auto& br : e.branches) {
    br.state = apply_tms(apply_phase(std::move(br.state), phi), p.g, 0.0, false);
  }
  check_leakage(e.leakage(), s1.n_cut(), "the second squeezer");
  e = apply_loss(e, p.T2, LossSite::external);
  return subtract_photons(std::move(e), p.m);
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

template <class R, class Eval, class Diff>
std::pair<R, std::pair<int, double>> converge(const OracleOptions& opt, Eval&& eval, Diff&& diff) {
  if (opt.n_cut_start < 2 || opt.n_cut_cap < opt.n_cut_start + 5) {
    throw ValidationError("oracle n_cut range must allow at least two sizes");
  }
  std::optional<R> prev;
  double last = INFINITY;
  for (int n = opt.n_cut_start; n <= opt.n_cut_cap; n += 5) {
    R cur;
    try {
      cur = eval(n);
    } catch (const NumericalError& e) {
      if (e.code() != ErrorCode::Leakage) throw;
      prev.reset();
      continue;
    }
    if (prev) {
      last = diff(*prev, cur);
      if (last < opt.tolerance) return {cur, {n, last}};
    }
    prev = cur;
  }
  throw NumericalError(ErrorCode::NotConverged,
                       "oracle not converged up to n_cut " + std::to_string(opt.n_cut_cap) +
                           " (last relative change " + std::to_string(last) + ")");
}

}  // namespace

OracleSensitivity numeric_sensitivity_at(const Params& p, Mode mode, double dphi_step, int n_cut) {
  p.validate();
  if (!(dphi_step >= 1e-6 && dphi_step <= 1e-3)) {
    throw ValidationError("oracle phase step must lie in [1e-6, 1e-3]");
  }
  const FockState s1 = first_squeezer(p, n_cut);
  auto at = [&](double phi) { return moments(output_ensemble(s1, p, phi), mode); };
  const MomentPair c = at(p.phi);
  const double dN = (at(p.phi + dphi_step).mean - at(p.phi - dphi_step).mean) / (2.0 * dphi_step);
  if (!(std::abs(dN) > 1e-12 * c.mean)) {
    throw NumericalError(ErrorCode::StationaryPoint, "d<N>/dphi vanishes");
  }
  OracleSensitivity r;
  r.mean_N = c.mean;
  r.mean_N2 = c.second;
  r.delta_phi = std::sqrt(std::max(c.second - c.mean * c.mean, 0.0)) / std::abs(dN);
  r.n_cut = n_cut;
  return r;
}

double numeric_qfi_pure_at(const Params& p, double dphi_step, int n_cut) {
  p.validate();
  if (p.T1 != 1.0 || p.T2 != 1.0) throw ValidationError("pure-state QFI oracle needs T1 = T2 = 1");
  if (!(dphi_step > 0.0 && dphi_step <= 0.1)) throw ValidationError("QFI step must lie in (0, 0.1]");
  const FockState s1 = first_squeezer(p, n_cut);
  auto state = [&](double phi) {
    BranchEnsemble e = subtract_photons(
        BranchEnsemble(apply_tms(apply_phase(s1, phi), p.g, 0.0)), p.m);
    FockState s = std::move(e.branches.front().state);
    s.normalize();
    return s;
  };
  const FockState c = state(p.phi);
  auto f = [&](double d) {
    const double up = std::abs(inner(c, state(p.phi + d)));
    const double dn = std::abs(inner(c, state(p.phi - d)));
    return 4.0 * ((1.0 - up) + (1.0 - dn)) / (d * d);
  };
  return (4.0 * f(0.5 * dphi_step) - f(dphi_step)) / 3.0;
}

double numeric_internal_photon_number_at(const Params& p, int n_cut) {
  p.validate();
  if (p.T2 != 1.0) throw ValidationError("internal photon number needs T2 = 1");
  BranchEnsemble e = output_ensemble(first_squeezer(p, n_cut), p, p.phi);
  for (auto& br : e.branches) br.state = apply_tms(br.state, p.g, M_PI, false);
  check_leakage(e.leakage(), n_cut, "the inverse squeezer");
  return moments(e, Mode::a).mean + moments(e, Mode::b).mean;
}

OracleSensitivity numeric_sensitivity(const Params& p, Mode mode, double dphi_step,
                                      const OracleOptions& opt) {
  auto [r, meta] = converge<OracleSensitivity>(
      opt, [&](int n) { return numeric_sensitivity_at(p, mode, dphi_step, n); },
      [](const OracleSensitivity& a, const OracleSensitivity& b) {
        return std::max({rel_diff(a.delta_phi, b.delta_phi), rel_diff(a.mean_N, b.mean_N),
                         rel_diff(a.mean_N2, b.mean_N2)});
      });
  r.n_cut = meta.first;
  r.rel_change = meta.second;
  return r;
}

OracleValue numeric_qfi_pure(const Params& p, double dphi_step, const OracleOptions& opt) {
  auto [v, meta] = converge<double>(
      opt, [&](int n) { return numeric_qfi_pure_at(p, dphi_step, n); }, rel_diff);
  return {v, meta.first, meta.second};
}

OracleValue numeric_internal_photon_number(const Params& p, const OracleOptions& opt) {
  auto [v, meta] = converge<double>(
      opt, [&](int n) { return numeric_internal_photon_number_at(p, n); }, rel_diff);
  return {v, meta.first, meta.second};
}

}  // namespace su11
