#pragma once

#include <memory>
#include <vector>

#include "su11/cdual.hpp"
#include "su11/model.hpp"

namespace su11 {

enum class Mode { a, b };
enum class LossSite { internal, external };

/// Two-mode amplitude tensor truncated at n_cut photons per mode.
class FockState {
 public:
  explicit FockState(int n_cut);

  int n_cut() const noexcept { return n_cut_; }
  int dim() const noexcept { return n_cut_ + 1; }
  cplx& operator()(int na, int nb) { return amps_[na * dim() + nb]; }
  const cplx& operator()(int na, int nb) const { return amps_[na * dim() + nb]; }
  std::vector<cplx>& amps() noexcept { return amps_; }
  const std::vector<cplx>& amps() const noexcept { return amps_; }

  double norm2() const;
  // Fraction of the norm in the two highest Fock layers of either mode.
  double leakage() const;
  void normalize();

  bool normalized = false;

 private:
  int n_cut_;
  std::vector<cplx> amps_;
};

struct Branch {
  FockState state;
  std::vector<int> origin;  // Kraus index l per loss channel applied so far
};

struct BranchEnsemble {
  std::vector<Branch> branches;
  double success_probability = 1.0;

  BranchEnsemble() = default;
  explicit BranchEnsemble(FockState s) { branches.push_back({std::move(s), {}}); }
  double trace() const;
  // Top-layer mass of the mixture relative to its trace. Individual branches
  // of high Kraus order may leak heavily while carrying negligible weight.
  double leakage() const;
};

inline constexpr double kLeakageTolerance = 1e-10;

// |0>_a |beta>_b. Throws a Leakage error when the coherent tail beyond n_cut
// exceeds 1e-14.
FockState prepare_input(double beta, int n_cut);

/// exp(xi ab - xi* a^dag b^dag), xi = g e^{i theta}.
///
/// The generator conserves n_a - n_b. In each sector a diagonal phase gauge
/// turns i*K into a real symmetric tridiagonal matrix that depends on g only,
/// so one eigendecomposition per (g, n_cut) serves every theta and the inverse.
class TwoModeSqueezer {
 public:
  TwoModeSqueezer(double g, int n_cut);
  ~TwoModeSqueezer();

  double g() const noexcept { return g_; }
  int n_cut() const noexcept { return n_cut_; }
  FockState apply(const FockState& in, double theta) const;

  // Shared instance from a bounded process-wide cache.
  static std::shared_ptr<const TwoModeSqueezer> cached(double g, int n_cut);

 private:
  struct Sectors;
  double g_;
  int n_cut_;
  std::unique_ptr<Sectors> sectors_;
};

// Squeezer followed by the leakage check (skipped with check = false, for
// branches whose leakage is judged on the whole ensemble).
FockState apply_tms(const FockState& in, double g, double theta, bool check = true);
FockState apply_phase(FockState s, double phi);
// Kraus expansion sqrt((1-T)^l / l!) T^{n/2} a^l on mode a. Branches whose
// weight is below 1e-18 of the input trace are dropped.
BranchEnsemble apply_loss(const BranchEnsemble& in, double T, LossSite site);
// Applies a^m to every branch and renormalizes globally; the pre-normalization
// trace is recorded as success_probability.
BranchEnsemble subtract_photons(BranchEnsemble in, int m);

struct MomentPair {
  double mean = 0.0;
  double second = 0.0;
};

MomentPair moments(const BranchEnsemble& e, Mode mode);

/// n_cut search: evaluate at n_cut_start, n_cut_start + 5, ... and accept the
/// first size whose result differs from the previous size by less than
/// `tolerance` relative. Sizes whose states leak are skipped.
struct OracleOptions {
  int n_cut_start = 30;
  int n_cut_cap = 160;
  double tolerance = 1e-8;
};

struct OracleSensitivity {
  double delta_phi = 0.0;
  double mean_N = 0.0;
  double mean_N2 = 0.0;
  int n_cut = 0;
  double rel_change = 0.0;  // against n_cut - 5
};

struct OracleValue {
  double value = 0.0;
  int n_cut = 0;
  double rel_change = 0.0;
};

// Fixed truncation.
OracleSensitivity numeric_sensitivity_at(const Params& p, Mode mode, double dphi_step, int n_cut);
double numeric_qfi_pure_at(const Params& p, double dphi_step, int n_cut);
double numeric_internal_photon_number_at(const Params& p, int n_cut);

// Converged in n_cut.
OracleSensitivity numeric_sensitivity(const Params& p, Mode mode = Mode::a,
                                      double dphi_step = 1e-4, const OracleOptions& opt = {});
OracleValue numeric_qfi_pure(const Params& p, double dphi_step = 4e-3,
                             const OracleOptions& opt = {});
OracleValue numeric_internal_photon_number(const Params& p, const OracleOptions& opt = {});

}  // namespace su11
